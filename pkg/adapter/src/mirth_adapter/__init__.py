from .config import AdapterConfig, load_config
from .data import Dataset, Example, load_dataset, write_predictions
from .finetune import finetune
from .search import random_search_adapter, sample_hyperparameters

__version__ = "0.1.0"

__all__ = [
    "AdapterConfig",
    "load_config",
    "Dataset",
    "Example",
    "load_dataset",
    "write_predictions",
    "finetune",
    "random_search_adapter",
    "sample_hyperparameters",
    "__version__",
]
