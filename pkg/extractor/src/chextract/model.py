"""Backbone assembly and weight handling.

The architecture is the standard 18-layer residual network; weights always
come from a state-dict file on disk (no downloads, no training here).  For
environments without the published ImageNet checkpoint, `save_random_weights`
writes a seeded random initialization so the extraction pipeline stays
exercisable; the output is then a deterministic image summary, not a
semantic embedding.
"""

from __future__ import annotations

from pathlib import Path

import torch
from torchvision.models import resnet18


def load_backbone(weights_path: Path | str) -> torch.nn.Module:
    """ResNet-18 in inference mode with weights from a state-dict file."""
    model = resnet18(weights=None)
    state = torch.load(str(weights_path), map_location="cpu", weights_only=True)
    if isinstance(state, dict) and "state_dict" in state:
        state = state["state_dict"]
    model.load_state_dict(state)
    model.eval()
    return model


def save_random_weights(path: Path | str, seed: int = 0) -> None:
    """Seeded random initialization saved as a loadable state dict."""
    torch.manual_seed(seed)
    model = resnet18(weights=None)
    torch.save(model.state_dict(), str(path))
