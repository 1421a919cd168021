from paired_gof.core.data import (
    FrequencyTable,
    GroupCounts,
    parse_frequency_table,
    serialize_frequency_table,
    validate,
)

__all__ = [
    "FrequencyTable",
    "GroupCounts",
    "parse_frequency_table",
    "serialize_frequency_table",
    "validate",
]
