"""Qualitative spatial representation: direction cones x distance bands."""

from rdq_lab.qsr.encoder import (
    OBJECT_CODES,
    QsrState,
    Relation,
    encode,
    object_code,
    object_type_of,
    parse_atom,
    relation_to_atom,
)
from rdq_lab.qsr.regions import (
    QsrGranularity,
    RegionSymbol,
    region_by_name,
    region_of,
    region_table,
    write_region_table,
)

__all__ = [
    "OBJECT_CODES",
    "QsrGranularity",
    "QsrState",
    "RegionSymbol",
    "Relation",
    "encode",
    "object_code",
    "object_type_of",
    "parse_atom",
    "region_by_name",
    "region_of",
    "region_table",
    "relation_to_atom",
    "write_region_table",
]
