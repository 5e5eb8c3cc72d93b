from .validation.err_shape import ErrShape, Exit1ShapeMismatch
from .validation.err_divisibility import ErrDivisibility, Exit1NotDivisible
from .validation.err_config import ErrConfig, Exit1InvalidConfig
from .validation.err_checkpoint import ErrCheckpoint, Exit1CheckpointMismatch
from .validation.err_sampling import ErrSampling, Exit1SamplingExhausted
from .numeric.err_nonfinite import ErrNonFinite, Exit2NumericalAbort
