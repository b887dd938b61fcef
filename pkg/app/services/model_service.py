"""
Model Service
Builds, saves and loads model files (space configuration, model spectrum
and singularity catalog) and exposes their log and log-derivative.
"""

import logging
from pathlib import Path
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from app.core.exceptions import ParseError
from app.core.model_zeta import (
    build_model_spectrum, catalog_from_spectra, model_log, model_logderiv,
)
from app.core.space_params import build_space_params
from app.core.validation import parse_weight_list
from app.models.schemas import ModelFile, OutputFormat, SingularityCatalog, SpaceConfig
from app.services.output_service import OutputService

logger = logging.getLogger(__name__)

CATALOG_COLUMNS = ["re", "im", "order"]


class ModelService:
    """Service for model zeta files."""

    def build(
        self,
        config: SpaceConfig,
        eigs: Sequence[Tuple[float, int]] = (),
        zero_mult: int = 0,
        lattice_cutoff: int = 0,
    ) -> ModelFile:
        ms = build_model_spectrum(
            config.params, eigs,
            include_zero=zero_mult > 0, zero_mult=zero_mult, lattice_cutoff=lattice_cutoff,
        )
        catalog = catalog_from_spectra(ms, config.sigma, config.params.T)
        return ModelFile(config=config, model=ms, catalog=catalog)

    def save(self, model_file: ModelFile, path: Union[str, Path]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(model_file.model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.info(f"Saved model with {len(model_file.catalog.items)} singularities to {path}")

    def load(self, path: Union[str, Path]) -> ModelFile:
        """Read a model file and re-derive its space constants."""
        path = Path(path)
        try:
            model_file = ModelFile.model_validate_json(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise ParseError(f"cannot read model file {path}: {e}")
        except ValidationError as e:
            raise ParseError(f"invalid model file {path}: {e.errors()[0]['msg']}")

        p = model_file.config.params
        params = build_space_params(
            p.n, p.T, p.rho, p.vol_Y, p.vol_Xd, p.dim_chi,
            [(w.weight, w.mult) for w in p.weights_nbar],
        )
        config = model_file.config.model_copy(update={"params": params})
        return model_file.model_copy(update={"config": config})

    def catalog_jsonl(self, catalog: SingularityCatalog) -> str:
        rows = [{"re": item.re, "im": item.im, "order": item.order} for item in catalog.items]
        return OutputService(OutputFormat.json).render(rows, CATALOG_COLUMNS)

    @staticmethod
    def log_function(catalog: SingularityCatalog) -> Callable[[complex], complex]:
        return lambda s: model_log(catalog, s)

    @staticmethod
    def logderiv_function(catalog: SingularityCatalog) -> Callable[[np.ndarray], np.ndarray]:
        return lambda s: model_logderiv(catalog, s)

    @staticmethod
    def parse_eigs(text: Optional[str]) -> Sequence[Tuple[float, int]]:
        """`s:m` comma lists, e.g. `1.5:1, 2.25:2`."""
        if not text:
            return []
        try:
            return parse_weight_list(text)
        except ValueError as e:
            raise ParseError(f"--eigs: {e}")
