"""
Pytest configuration and shared fixtures
"""

import tempfile

import numpy as np
import pytest

from nmsim.config import settings
from nmsim.config.hardware_profile import SSD_MODEL_FILE
from nmsim.config.settings import HwConfig
from nmsim.ingest.model_loader import load_model_file
from nmsim.models.layer_models import Activation, CnnModel, LayerKind, LayerSpec
from nmsim.models.numeric_models import NumericProfile
from nmsim.models.tensor_models import FeatureMapTensor, WeightStore


@pytest.fixture(autouse=True)
def reset_global_config():
    """Each test sees a freshly built global configuration"""
    settings._config_instance = None
    yield
    settings._config_instance = None


@pytest.fixture
def temp_directory():
    """Create temporary directory"""
    with tempfile.TemporaryDirectory() as temp_dir:
        yield temp_dir


@pytest.fixture
def hw():
    """Reference hardware parameters"""
    return HwConfig()


@pytest.fixture
def int8_profile():
    return NumericProfile.int8()


@pytest.fixture
def wide_profile():
    return NumericProfile.wide()


@pytest.fixture(scope="session")
def ssd_model():
    """The 47-layer SSD/MobileNet reconstruction shipped with the package"""
    return load_model_file(SSD_MODEL_FILE)


def make_layer(index, kind, w, h, c, f, stride=1, **extra):
    """Build a LayerSpec whose output size follows the same-padding rule"""
    k = 1 if kind == LayerKind.CONV1X1 else 3
    return LayerSpec(
        index=index, kind=kind, w_in=w, h_in=h,
        w_out=-(-w // stride), h_out=-(-h // stride),
        c_in=c, f_out=1 if kind == LayerKind.DW3X3 else f, k=k, stride=stride, **extra
    )


@pytest.fixture
def layer_factory():
    return make_layer


@pytest.fixture
def tiny_model():
    """A single 2x2 Std3x3 layer with one input and one output map"""
    return CnnModel(name="tiny", layers=[make_layer(1, LayerKind.STD3X3, 2, 2, 1, 1)])


@pytest.fixture
def chain_model():
    """
    Mixed model covering stride 2, depthwise, idle 1x1 input lanes,
    two filter passes and a head reading an earlier layer
    """
    return CnnModel(name="chain", layers=[
        make_layer(1, LayerKind.STD3X3, 9, 7, 3, 8, stride=2, activation=Activation.RELU),
        make_layer(2, LayerKind.DW3X3, 5, 4, 8, 1, activation=Activation.RELU6),
        make_layer(3, LayerKind.CONV1X1, 5, 4, 8, 30),
        make_layer(4, LayerKind.STD3X3, 5, 4, 8, 5, source=2, has_bias=False),
    ])


@pytest.fixture
def chain_weights(chain_model, int8_profile):
    return WeightStore.random(chain_model, int8_profile, seed=7)


def random_image(model, profile, seed=0):
    """Deterministic random input image in the profile's activation domain"""
    c, w, h = model.input_shape
    pixels = np.random.default_rng(seed).integers(0, 255, size=(c, h, w), endpoint=True)
    return FeatureMapTensor(profile.pixels_to_activations(pixels))


@pytest.fixture
def chain_image(chain_model, int8_profile):
    return random_image(chain_model, int8_profile, seed=3)


@pytest.fixture
def image_factory():
    return random_image
