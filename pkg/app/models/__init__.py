from .dataset import Dataset, LabelEncoding, add_bias, validate_dataset
from .support import ParamVector, Support

__all__ = ["Dataset", "LabelEncoding", "add_bias", "validate_dataset", "ParamVector", "Support"]
