"""
运行清单模块
收集一次命令行运行引用的全部文件，并在模拟开始前完成存在性检查与解析
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, Field

from ..config.hardware_profile import load_hw_config, load_numeric_profile
from ..config.settings import HwConfig
from ..exceptions.custom_exceptions import ManifestException, NmSimException
from ..ingest.image_loader import load_image
from ..ingest.model_loader import load_model_file, validate_model
from ..ingest.weight_codec import load_weights
from ..models.layer_models import CnnModel
from ..models.numeric_models import NumericProfile
from ..models.tensor_models import FeatureMapTensor, WeightStore

logger = logging.getLogger(__name__)


@dataclass
class LoadedRun:
    """解析完成的运行输入"""
    model: CnnModel
    hw: HwConfig
    profile: NumericProfile
    weights: Optional[WeightStore]
    images: List[FeatureMapTensor]


class RunManifest(BaseModel):
    """一次运行引用的全部输入输出路径"""
    model_path: Path
    weights_path: Optional[Path] = None
    image_paths: List[Path] = Field(default_factory=list)
    hw_path: Optional[Path] = None
    # 预置名称（int8 / wide）或YAML路径
    profile: Optional[str] = None
    report_path: Optional[Path] = None
    table_path: Optional[Path] = None
    seed: Optional[int] = None

    def input_paths(self) -> List[Path]:
        paths = [self.model_path]
        if self.weights_path is not None:
            paths.append(self.weights_path)
        paths.extend(self.image_paths)
        if self.hw_path is not None:
            paths.append(self.hw_path)
        if self.profile is not None and self.profile not in ('int8', 'wide'):
            paths.append(Path(self.profile))
        return paths

    def check_files(self) -> None:
        """
        检查所有输入文件存在

        Raises:
            ManifestException: 文件缺失，消息中包含路径
        """
        for path in self.input_paths():
            if not path.is_file():
                raise ManifestException(f"Input file not found: {path}", path=str(path))

    def _check_model(self, model: CnnModel, profile: NumericProfile) -> None:
        """
        模型与数值配置必须通过校验后才能编译执行

        Raises:
            ManifestException: 列出全部诊断
        """
        # k没有硬件配置时由SOT编译器报告
        blocking = [diagnostic for diagnostic in validate_model(model, profile) if diagnostic.code != 'kernel_kind']
        if blocking:
            details = '; '.join(str(diagnostic) for diagnostic in blocking)
            raise ManifestException(f"Model '{model.name}' fails validation: {details}", path=str(self.model_path))

    def load(self, require_weights: bool = True, require_images: bool = True) -> LoadedRun:
        """
        检查并解析全部输入

        Args:
            require_weights: 是否必须提供权重
            require_images: 是否必须提供至少一张图像

        Returns:
            LoadedRun

        Raises:
            ManifestException: 缺少必需输入、文件缺失或模型未通过校验
            NmSimException: 输入文件内容无效（原样抛出）
        """
        if require_weights and self.weights_path is None:
            raise ManifestException("A weights file is required (--weights)")
        if require_images and not self.image_paths:
            raise ManifestException("At least one image is required (--image)")
        self.check_files()

        try:
            hw = load_hw_config(self.hw_path)
            profile = load_numeric_profile(self.profile)
            model = load_model_file(self.model_path)
            self._check_model(model, profile)
            weights = None
            if self.weights_path is not None:
                weights = load_weights(self.weights_path.read_bytes(), model, profile)
            images = [load_image(path, profile) for path in self.image_paths]
        except NmSimException:
            raise
        except Exception as e:
            raise ManifestException(f"Failed to read run inputs: {str(e)}", cause=e)

        logger.info(f"Loaded manifest: model '{model.name}', {len(images)} image(s)")
        return LoadedRun(model=model, hw=hw, profile=profile, weights=weights, images=images)
