//! Text rendering of complexity reports: an aligned table with one row per
//! ranked instance, plus an optional machine-readable key-value emission.

use graftlab_core::complexity::ComplexityReport;

use crate::kv::format_line;

/// Aligned table mirroring the layout
/// `Layer | Grafting (log2) | Seeking (log2) | P(Signable) | Total (log2)`.
pub fn render_table(report: &ComplexityReport) -> String {
    let header = [
        "Layer",
        "Grafting (log2)",
        "Seeking (log2)",
        "P(Signable)",
        "Total (log2)",
        "Obs",
        "Ident (hashes)",
    ];
    let rows: Vec<[String; 7]> = report
        .rows
        .iter()
        .map(|row| {
            [
                row.address.layer.to_string(),
                format!("{:.2}", row.grafting_hashes_log2),
                row.seeking_log2.to_string(),
                row.p_signable.to_string(),
                format!("{:.2}", row.total_log2),
                row.observations.to_string(),
                row.identify_hash_ops.to_string(),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let fmt_row = |cells: &[String]| -> String {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join(" | ")
    };
    let header_cells: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    out.push_str(&fmt_row(&header_cells));
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 3 * (widths.len() - 1)));
    out.push('\n');
    for row in &rows {
        out.push_str(&fmt_row(row));
        out.push('\n');
    }
    out
}

/// Machine-readable emission: one key-value line per ranked instance.
pub fn render_machine(report: &ComplexityReport) -> String {
    let mut out = String::new();
    for (rank, row) in report.rows.iter().enumerate() {
        out.push_str(&format_line(&[
            ("rank", rank.to_string()),
            ("layer", row.address.layer.to_string()),
            ("tree", row.address.tree.to_string()),
            ("keypair", row.address.keypair.to_string()),
            ("observations", row.observations.to_string()),
            ("p_signable", row.p_signable.to_string()),
            ("grafting_log2", format!("{:.4}", row.grafting_hashes_log2)),
            ("seeking_log2", row.seeking_log2.to_string()),
            ("total_log2", format!("{:.4}", row.total_log2)),
            ("identify_hashes", row.identify_hash_ops.to_string()),
        ]));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use graftlab_core::complexity::{rank_instances, CostModel};
    use graftlab_core::hashes::Node;
    use graftlab_core::identify::CompromisedInstance;
    use graftlab_core::observe::InstanceAddress;
    use graftlab_core::params::parameter_set;

    fn instance(layer: u32, exposed_min: Vec<u8>) -> CompromisedInstance {
        CompromisedInstance {
            address: InstanceAddress {
                layer,
                tree: 0,
                keypair: 0,
            },
            exposed_min,
            exposed_nodes: vec![Node::from_slice(&[0]); 6],
            auth_path: vec![],
            upper_layers: vec![],
            observation_count: 2,
            accepted_count: 2,
            distinct_values: vec![],
            hash_ops: 42,
        }
    }

    #[test]
    fn table_ranks_lower_seeking_first_when_grafting_ties() {
        let params = parameter_set("toy-w4").unwrap();
        let model = CostModel::for_params(params);
        let minima = vec![1, 0, 2, 3, 1, 1];
        let report = rank_instances(
            params,
            &model,
            &[instance(0, minima.clone()), instance(1, minima)],
        )
        .unwrap();
        assert_eq!(report.rows[0].address.layer, 1, "higher layer seeks less");
        assert!(report.rows[0].total_log2 <= report.rows[1].total_log2);
        let table = render_table(&report);
        assert!(table.contains("Layer"));
        assert!(table.contains("1/64"));
        let machine = render_machine(&report);
        assert!(machine.starts_with("rank=0 "));
        assert_eq!(machine.lines().count(), 2);
    }
}
