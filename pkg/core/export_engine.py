"""
Module for exporting run artifacts.

This module writes trajectories, spectra, eigensolver results and
verification reports as CSV (pandas) and JSON files under one export
directory.
"""

import json
import logging
import threading
from pathlib import Path
from typing import Any, Dict, Iterable, List, Literal, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from core.dynamics import Trajectory
from core.qnumeric import EigenResult
from core.qspectra import Spectrum

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = ['t', 'x', 'y', 'px', 'py', 'H', 'Hxi', 'X', 'Y', 'J']
AMBIENT_COLUMNS = ['t', 'x0', 'x1', 'x2']
COMPARISON_COLUMNS = ['mu', 'nu', 'fd_energy', 'closed_form', 'rel_error']
DEGENERACY_COLUMNS = ['key', 'size', 'energy', 'spread', 'members']


class ExportConfig(BaseModel):
    """Configuration for export operations."""
    float_format: str = "%.17g"
    lineterminator: str = "\n"
    indent: int = 2


def _to_builtin(value: Any) -> Any:
    """Convert numpy scalars and arrays into JSON-serializable Python values."""
    if isinstance(value, dict):
        return {str(k): _to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_to_builtin(v) for v in value.tolist()]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, BaseModel):
        return _to_builtin(value.model_dump(mode='json'))
    return value


class ExportEngine:
    """
    Handles exporting run artifacts to CSV and JSON.

    Writes to one path are serialized; different paths may be written
    concurrently from worker threads.

    Attributes:
        export_dir (Path): Directory for storing exports
        config (ExportConfig): Number and file formatting
    """

    def __init__(self, export_dir: Union[str, Path], config: Optional[ExportConfig] = None):
        """
        Initialize the export engine.

        Args:
            export_dir (Union[str, Path]): Directory for storing exports
            config (Optional[ExportConfig]): Formatting options
        """
        self.export_dir = Path(export_dir)
        self.export_dir.mkdir(parents=True, exist_ok=True)
        self.config = config or ExportConfig()
        self._locks: Dict[Path, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _lock_for(self, path: Path) -> threading.Lock:
        with self._registry_lock:
            if path not in self._locks:
                self._locks[path] = threading.Lock()
            return self._locks[path]

    def export_data(
        self,
        data: pd.DataFrame,
        format: Literal['csv', 'json'] = 'csv',
        filename: str = 'exported_data'
    ) -> Path:
        """
        Export a table to a file.

        Args:
            data (pd.DataFrame): Data to export
            format (Literal['csv', 'json']): Export format
            filename (str): Base filename (without extension)

        Returns:
            Path: Path to the exported file

        Raises:
            ValueError: If the format is not supported
        """
        if format == 'csv':
            return self._export_to_csv(data, self.export_dir / f"{filename}.csv")
        if format == 'json':
            return self._export_to_json(data.to_dict(orient='list'), self.export_dir / f"{filename}.json")
        raise ValueError(f"Unsupported export format: {format}")

    def export_json(self, data: Dict[str, Any], filename: str) -> Path:
        """Export a dictionary as sorted, indented UTF-8 JSON."""
        return self._export_to_json(data, self.export_dir / f"{filename}.json")

    def export_trajectory(self, traj: Trajectory, filename: str = 'trajectory') -> Tuple[Path, Path]:
        """
        Export a trajectory and its ambient embedding.

        The trajectory CSV has columns t, x, y, px, py followed by the logged
        quantities in the order H, Hxi, X, Y, J (absent logs are omitted). The
        ambient CSV has columns t, x0, x1, x2.

        Returns:
            Tuple[Path, Path]: Trajectory CSV and ambient CSV
        """
        frame = traj.to_frame()
        frame = frame[[c for c in TRAJECTORY_COLUMNS if c in frame.columns]]
        ambient = traj.ambient()
        ambient_frame = pd.DataFrame({
            't': traj.times,
            'x0': ambient[:, 0],
            'x1': ambient[:, 1],
            'x2': ambient[:, 2],
        })
        traj_path = self._export_to_csv(frame, self.export_dir / f"{filename}.csv")
        ambient_path = self._export_to_csv(ambient_frame, self.export_dir / f"{filename}_ambient.csv")
        return traj_path, ambient_path

    def export_spectrum(self, spectrum: Spectrum, filename: str = 'spectrum') -> Path:
        """Export a spectrum as JSON with keys params, entries, classes and empty_mu."""
        return self._export_to_json(spectrum.to_dict(), self.export_dir / f"{filename}.json")

    def export_degeneracies(self, spectrum: Spectrum, filename: str = 'degeneracies') -> Path:
        """Export the degeneracy classes as CSV; members are written as 'mu:nu' joined by ';'."""
        rows = [
            {
                'key': c.key,
                'size': c.size,
                'energy': c.energy,
                'spread': c.spread,
                'members': ";".join(f"{mu}:{nu}" for mu, nu in c.members),
            }
            for c in spectrum.classes
        ]
        frame = pd.DataFrame(rows, columns=DEGENERACY_COLUMNS)
        return self._export_to_csv(frame, self.export_dir / f"{filename}.csv")

    def export_eigen(self, result: EigenResult, filename: str = 'eigen') -> Tuple[Path, Path]:
        """
        Export an eigensolver result.

        The CSV holds the grid point column 'u' and one column 'v<k>' per
        eigenvector (symmetrized variable, unit discrete norm); the JSON holds
        the eigenvalues and the grid.

        Returns:
            Tuple[Path, Path]: Eigenvector CSV and eigenvalue JSON
        """
        columns: Dict[str, np.ndarray] = {'u': result.grid.points}
        for k in range(result.n_eigs):
            columns[f"v{k}"] = result.eigenvectors[:, k]
        vectors_path = self._export_to_csv(pd.DataFrame(columns), self.export_dir / f"{filename}_vectors.csv")
        payload = {
            'axis': result.axis,
            'scheme': result.scheme.value,
            'gamma_eps': result.gamma_eps,
            'grid': {'a': result.grid.a, 'b': result.grid.b, 'n_points': result.grid.n_points, 'h': result.grid.h},
            'eigenvalues': result.eigenvalues,
        }
        values_path = self._export_to_json(payload, self.export_dir / f"{filename}_values.json")
        return vectors_path, values_path

    def export_comparison(self, rows: Iterable[Dict[str, Any]], filename: str = 'comparison') -> Path:
        """Export a finite-difference versus closed-form table (mu, nu, fd_energy, closed_form, rel_error)."""
        frame = pd.DataFrame(list(rows), columns=COMPARISON_COLUMNS)
        return self._export_to_csv(frame, self.export_dir / f"{filename}.csv")

    def _export_to_csv(self, data: pd.DataFrame, file_path: Path) -> Path:
        """Export data to CSV format."""
        with self._lock_for(file_path):
            data.to_csv(
                file_path,
                index=False,
                float_format=self.config.float_format,
                lineterminator=self.config.lineterminator,
            )
        logger.info("wrote %s rows to %s", len(data), file_path)
        return file_path

    def _export_to_json(self, data: Dict[str, Any], file_path: Path) -> Path:
        """Export data to JSON format."""
        text = json.dumps(_to_builtin(data), sort_keys=True, indent=self.config.indent, allow_nan=True)
        with self._lock_for(file_path):
            with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
                f.write(text)
                f.write("\n")
        logger.info("wrote %s", file_path)
        return file_path

    def written(self) -> List[Path]:
        """Paths written through this engine."""
        with self._registry_lock:
            return sorted(self._locks)
