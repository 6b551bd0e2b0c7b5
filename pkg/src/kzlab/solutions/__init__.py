"""Closed-form and integral solutions of the KZ systems and Bethe diagnostics."""
from .appendix import appendix_section, kz_residuals, displayed_residual
from .bethe import bethe
from .contours import ContourSpec, contour_nodes, keyhole, residue_limit_check, residue_target
from .hypergeom import hyp2f1, hyp2f1_deriv
from .integrals import FOUR_POINT_ORDERINGS, integral_solution
from .master import (CorrespondenceTable, MasterData, derived_table, empty_sector_data,
                     master_log_grad, omega_eval, verbatim_table)

__all__ = [
    "appendix_section", "kz_residuals", "displayed_residual", "bethe", "ContourSpec",
    "contour_nodes", "keyhole", "residue_limit_check", "residue_target", "hyp2f1",
    "hyp2f1_deriv", "FOUR_POINT_ORDERINGS", "integral_solution", "CorrespondenceTable",
    "MasterData", "derived_table", "empty_sector_data", "master_log_grad", "omega_eval",
    "verbatim_table",
]
