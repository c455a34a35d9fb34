"""
随机对拍模块
生成随机的小型模型、权重与图像，比较SOT执行器与参考实现的逐层输出，
并检查乘法器周期统计的划分性质；首个失败用例写出复现包
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from ..config.hardware_profile import dump_numeric_profile
from ..config.settings import HwConfig
from ..control.executor import SotExecutor
from ..control.sot_compiler import compile_sot
from ..exceptions.custom_exceptions import NmSimException, OracleMismatchException, PartitionViolationException
from ..ingest.image_loader import save_image
from ..ingest.model_loader import dump_model
from ..ingest.weight_codec import save_weights
from ..models.layer_models import Activation, CnnModel, LayerKind, LayerSpec
from ..models.numeric_models import NumericProfile
from ..models.tensor_models import FeatureMapTensor, WeightStore
from ..oracle.reference import infer_ref

logger = logging.getLogger(__name__)

MAX_LAYERS = 4
MAX_MAPS = 64
MAX_SIZE = 32

_KINDS = (LayerKind.STD3X3, LayerKind.DW3X3, LayerKind.CONV1X1)
_ACTIVATIONS = (Activation.NONE, Activation.RELU, Activation.RELU6)

# 逐周期执行驱动receptor与每个HardwareNeuron，对拍默认使用该方式
FUZZ_MODE = 'cycle'


@dataclass
class FuzzCase:
    """单个随机用例"""
    index: int
    model: CnnModel
    profile: NumericProfile
    weights: WeightStore
    image: FeatureMapTensor


def _draw_size(rng: np.random.Generator, upper: int) -> int:
    """对数均匀地取 [1, upper] 内的整数，上界可达但小尺寸更常见"""
    return min(upper, int((upper + 1) ** rng.random()))


def random_model(rng: np.random.Generator, name: str) -> CnnModel:
    """
    生成满足形状链规则的随机模型（至少含一个3×3层）

    通道数与特征图尺寸按对数均匀分布抽取，使逐周期执行的期望代价保持较小。

    Args:
        rng: 随机数生成器
        name: 模型名称

    Returns:
        CnnModel
    """
    count = int(rng.integers(1, MAX_LAYERS, endpoint=True))
    kinds = [_KINDS[int(rng.integers(len(_KINDS)))] for _ in range(count)]
    if all(kind == LayerKind.CONV1X1 for kind in kinds):
        kinds[0] = LayerKind.STD3X3

    c = _draw_size(rng, MAX_MAPS)
    w = _draw_size(rng, MAX_SIZE)
    h = _draw_size(rng, MAX_SIZE)
    layers: List[LayerSpec] = []
    for index, kind in enumerate(kinds, start=1):
        stride = int(rng.integers(1, 2, endpoint=True))
        f = 1 if kind == LayerKind.DW3X3 else _draw_size(rng, MAX_MAPS)
        layer = LayerSpec(
            index=index, kind=kind,
            w_in=w, h_in=h, w_out=-(-w // stride), h_out=-(-h // stride),
            c_in=c, f_out=f, k=1 if kind == LayerKind.CONV1X1 else 3, stride=stride,
            activation=_ACTIVATIONS[int(rng.integers(len(_ACTIVATIONS)))],
            has_bias=bool(rng.integers(2))
        )
        layers.append(layer)
        c, w, h = layer.out_maps, layer.w_out, layer.h_out
    return CnnModel(name=name, layers=layers)


def random_case(seed: int, index: int) -> FuzzCase:
    """由 (seed, index) 确定性地生成用例；偶数用例用int8，奇数用wide"""
    rng = np.random.default_rng([seed, index])
    model = random_model(rng, name=f"fuzz-{seed}-{index}")
    profile = NumericProfile.int8() if index % 2 == 0 else NumericProfile.wide()
    weights = WeightStore.random(model, profile, seed=int(rng.integers(1 << 31)))
    c, w, h = model.input_shape
    pixels = rng.integers(0, 255, size=(c, h, w), endpoint=True, dtype=np.int64)
    image = FeatureMapTensor(profile.pixels_to_activations(pixels))
    return FuzzCase(index=index, model=model, profile=profile, weights=weights, image=image)


def check_case(case: FuzzCase, hw: HwConfig, mode: str = FUZZ_MODE) -> None:
    """
    执行单个用例并与参考实现对比

    Raises:
        OracleMismatchException: 某层输出不一致
        PartitionViolationException: 周期统计不闭合
    """
    program = compile_sot(case.model, hw)
    outputs, stats = SotExecutor(hw, case.profile, mode=mode).run(program, case.weights, case.image)
    expected, _ = infer_ref(case.model, case.weights, case.image, case.profile)

    for layer, actual, reference in zip(case.model.layers, outputs, expected):
        if actual != reference:
            mismatches = int(np.count_nonzero(actual.data != reference.data))
            raise OracleMismatchException(
                f"Case {case.index}: layer {layer.index} differs from the reference in {mismatches} values",
                layer_index=layer.index
            )
    for layer_stats in stats.layers:
        if layer_stats.accounted != layer_stats.peak_muls_c:
            raise PartitionViolationException(
                f"Case {case.index}: layer {layer_stats.layer_index} accounts for "
                f"{layer_stats.accounted} of {layer_stats.peak_muls_c} multiplier-cycles",
                layer_index=layer_stats.layer_index
            )


def write_repro(case: FuzzCase, error: Exception, out_dir: Path) -> Path:
    """
    写出复现包：模型JSON、NMW1权重、NMI1图像、数值配置YAML与失败说明

    Returns:
        复现包目录
    """
    bundle = out_dir / f"repro-{case.model.name}"
    bundle.mkdir(parents=True, exist_ok=True)
    (bundle / "model.json").write_bytes(dump_model(case.model))
    (bundle / "weights.nmw").write_bytes(save_weights(case.weights, case.model, case.profile))
    (bundle / "image.nmi").write_bytes(save_image(case.image, case.profile))
    (bundle / "profile.yaml").write_text(dump_numeric_profile(case.profile), encoding="utf-8")
    (bundle / "failure.txt").write_text(f"{type(error).__name__}: {error}\n", encoding="utf-8")
    logger.error(f"Fuzz case {case.index} failed, repro bundle written to {bundle}")
    return bundle


def run_fuzz(seed: int, count: int, hw: HwConfig, out_dir: Optional[Path] = None,
             mode: str = FUZZ_MODE) -> int:
    """
    执行随机对拍

    Args:
        seed: 随机种子
        count: 用例数，0时不做任何事
        hw: 硬件参数
        out_dir: 复现包输出目录，默认当前目录
        mode: 执行器模式

    Returns:
        通过的用例数

    Raises:
        NmSimException: 首个失败用例的异常（复现包已写出）
    """
    out_dir = out_dir or Path.cwd()
    for index in range(count):
        case = random_case(seed, index)
        try:
            check_case(case, hw, mode=mode)
        except NmSimException as e:
            write_repro(case, e, out_dir)
            raise
        except Exception as e:
            write_repro(case, e, out_dir)
            raise OracleMismatchException(f"Case {index} crashed: {str(e)}", cause=e)
        logger.debug(f"Fuzz case {index} passed ({len(case.model)} layers, profile {case.profile.name})")
    logger.info(f"Fuzz campaign seed={seed}: {count} cases passed")
    return count
