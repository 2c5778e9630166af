use proptest::prelude::*;
use qpack::netlist::{export_netlist, parse_netlist};
use qpack_core::lattice::{nju13_layout, validate_layout, BusResonator, ChipLayout, QubitNode, QubitRole};

fn role(i: u8) -> QubitRole {
    [QubitRole::Data, QubitRole::MeasureX, QubitRole::MeasureZ][i as usize % 3]
}

prop_compose! {
    fn layouts()(
        nodes in prop::collection::vec((0u8..3, -4i32..5, -4i32..5), 1..16),
        buses in prop::collection::vec((any::<prop::sample::Index>(), prop::collection::vec(any::<prop::sample::Index>(), 1..5)), 0..8),
        readout in prop::collection::vec((any::<prop::sample::Index>(), 1u32..20), 0..16),
        w in 1e-3..0.1f64,
        h in 1e-3..0.1f64,
        preset in prop::bool::ANY,
    ) -> ChipLayout {
        let qubits: Vec<QubitNode> = nodes.iter().enumerate()
            .map(|(i, &(r, row, col))| QubitNode::new(&format!("Q{i}"), role(r), (row, col)))
            .collect();
        let ids: Vec<&str> = qubits.iter().map(|q| q.id.as_str()).collect();
        let buses = buses.iter().enumerate().map(|(i, (hub, branches))| {
            let b: Vec<&str> = branches.iter().map(|x| *x.get(&ids)).collect();
            BusResonator::new(&format!("B{i}"), hub.get(&ids), &b)
        }).collect();
        let readout_assignments = readout.iter().map(|(q, c)| (q.get(&ids).to_string(), format!("C{c:02}"))).collect();
        ChipLayout {
            qubits,
            buses,
            readout_assignments,
            chip_size: (w, h),
            preset: preset.then(|| "nju13".to_string()),
        }
    }
}

proptest! {
    #[test]
    fn export_parse_export_is_stable(layout in layouts()) {
        let text = export_netlist(&layout);
        let back = parse_netlist(&text).unwrap();
        prop_assert_eq!(export_netlist(&back), text);
        prop_assert_eq!(validate_layout(&back).is_valid(), validate_layout(&layout).is_valid());
    }

    #[test]
    fn qubit_order_does_not_change_the_netlist(seed in any::<u64>()) {
        let mut layout = nju13_layout();
        let n = layout.qubits.len();
        layout.qubits.rotate_left(seed as usize % n);
        layout.buses.reverse();
        prop_assert_eq!(export_netlist(&layout), export_netlist(&nju13_layout()));
    }
}
