from .config_model import AppConfig
from .density_model import GmmComponent, GmmModel, Hyperplane, PointCloud
