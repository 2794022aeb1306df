"""HTTP inference service implementing the bioaug backend wire contracts."""

from bioaug_sidecar.app import create_app
from bioaug_sidecar.config import SidecarConfig

__all__ = ["create_app", "SidecarConfig"]
