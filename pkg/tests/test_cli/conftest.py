"""
CLI测试共用夹具
"""

from pathlib import Path

import pytest
from click.testing import CliRunner

from nmsim.ingest.image_loader import save_image
from nmsim.ingest.model_loader import dump_model
from nmsim.ingest.weight_codec import save_weights


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def run_files(temp_directory, chain_model, chain_weights, chain_image, int8_profile):
    """把小模型的模型/权重/图像写成命令行输入文件"""
    root = Path(temp_directory)
    files = {
        'model': root / 'chain.json',
        'weights': root / 'chain.nmw',
        'image': root / 'chain.nmi',
    }
    files['model'].write_bytes(dump_model(chain_model))
    files['weights'].write_bytes(save_weights(chain_weights, chain_model, int8_profile))
    files['image'].write_bytes(save_image(chain_image, int8_profile))
    return files
