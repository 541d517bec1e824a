"""Sketch-guided technology mapping onto FPGA primitives."""

from ._core import (
    ArchDescription,
    JsonSchemaError,
    MissingInit,
    NotStructural,
    ParseError,
    Prog,
    SchemaError,
    Sketch,
    SketchmapError,
    WidthError,
    available_solvers,
    benchgen,
    check_well_formed,
    from_json_netlist,
    generate_sketch,
    import_btor2,
    list_templates,
    load_arch,
    load_spec,
    netlists_isomorphic,
    parse_spec,
    run_map,
    synthesize,
    to_json_netlist,
    to_structural_verilog,
)

__all__ = [name for name in dir() if not name.startswith("_")]
