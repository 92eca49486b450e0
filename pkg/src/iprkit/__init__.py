"""Finite combinatorics of image partition regular matrices."""

from .core import (
    Matrix,
    compress,
    delete_zeros,
    diagonal_sum,
    is_compressed,
    matrix_image,
    parse_matrix,
    render_matrix,
    schur_matrix,
    vdw_matrix,
)
from .conditions import columns_condition_check, first_entries_check, rational_span_member
from .families import RowFamily, enumerate_rows, mt, row_count, split_columns, validate_subtracted, weak_mt
from .search import (
    Avoidable,
    Coloring,
    Forced,
    Inconclusive,
    Verdict,
    enumerate_images,
    find_avoiding_coloring,
    find_monochromatic_witness,
    verify_ipr_finite,
)
from .systems import BlockSystem, fp_set, fs_set, mt_set, pmt_set, product_subsystem, sum_subsystem, wmt_set

__version__ = "0.1.0"
