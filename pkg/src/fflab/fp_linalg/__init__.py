from .charpoly import (charpoly_coeffs, eval_poly_all, hessenberg, matmul_mod, poly_at_matrix,
                       roots_in_prime_field)
from .elimination import batch_rank, nullspace, row_echelon
from .fields import ExtensionOps, PrimeOps
from .gf2 import batch_rank_gf2, pack_rows
from .matrix import (KernelBasis, MatrixOverFp, MatrixOverFq, canonical_normal_vector, charpoly,
                     is_eigenvalue_free, kernel_filtration, lambda_phi, left_kernel, rank,
                     rank_array, rank_minus_root)

__all__ = [
    "charpoly_coeffs", "eval_poly_all", "hessenberg", "matmul_mod", "poly_at_matrix",
    "roots_in_prime_field", "batch_rank", "nullspace", "row_echelon", "ExtensionOps",
    "PrimeOps", "batch_rank_gf2", "pack_rows", "KernelBasis", "MatrixOverFp", "MatrixOverFq",
    "canonical_normal_vector", "charpoly", "is_eigenvalue_free", "kernel_filtration",
    "lambda_phi", "left_kernel", "rank", "rank_array", "rank_minus_root",
]
