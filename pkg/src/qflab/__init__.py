from qflab.curves import HyperellipticCurve, ProjectiveLine, delta_image_test, dn_subgroup_test, principal_divisor
from qflab.forms import DiagonalForm, invariants, is_isometric, is_isotropic, is_isotropic_global, witt_index
from qflab.log_context import bind_log_context
from qflab.logging_config import LoggingConfig, configure_logging
from qflab.logging_manager import get_logger
from qflab.obstruction import constant_fiber_pipeline, local_triviality, real_place_counterexample_report
from qflab.pfister import PfisterForm, norm_member
from qflab.places import Place, hilbert_symbol

__all__ = (  # noqa: WPS410
    'DiagonalForm',
    'HyperellipticCurve',
    'LoggingConfig',
    'PfisterForm',
    'Place',
    'ProjectiveLine',
    'bind_log_context',
    'configure_logging',
    'constant_fiber_pipeline',
    'delta_image_test',
    'dn_subgroup_test',
    'get_logger',
    'hilbert_symbol',
    'invariants',
    'is_isometric',
    'is_isotropic',
    'is_isotropic_global',
    'local_triviality',
    'norm_member',
    'principal_divisor',
    'real_place_counterexample_report',
    'witt_index',
)
