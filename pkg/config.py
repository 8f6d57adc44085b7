"""Configuration management using Pydantic Settings"""
from pathlib import Path
from typing import Optional
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Laboratory configuration settings"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="SPECTRAL_LAB_",
        case_sensitive=False
    )

    # Storage
    cache: Optional[Path] = Field(default=None, description="Eigendecomposition cache directory")

    # Logging
    log_level: str = Field(default="INFO", description="Logging level")
    log_dir: Path = Field(default=Path("logs"), description="Directory for log files")

    # Reproducibility and parallelism
    seed: int = Field(default=0, description="Seed for iterative solver starts and random instances")
    jobs: int = Field(default=1, ge=1, description="Worker count for grid sweeps")

    # Spectral tolerances
    rtol: float = Field(default=1e-9, gt=0, description="Relative eigenvalue tolerance")
    count_guard: float = Field(default=1e-9, gt=0, description="Relative guard band around count thresholds")
    bound_abs_tol: float = Field(default=1e-10, gt=0, description="Absolute tolerance of bound margins (scaled)")
    max_iterations: int = Field(default=10000, description="ARPACK iteration cap")
    pivot_tol: float = Field(default=1e-12, ge=0, description="Pivots below pivot_tol times the largest diagonal entry count as zero")
    dense_limit: int = Field(default=1500, description="Largest DOF count handled by dense factorizations")

    # Size guards
    max_vertices: int = Field(default=250000, description="Vertex count cap of graph builders")
    heat_max_dofs: int = Field(default=4000, description="DOF cap of full eigendecompositions")

    # Mesh
    mesh_min_intervals: int = Field(default=8, ge=2, description="Minimum FEM intervals per edge")
    mesh_h_fraction: float = Field(default=1 / 64, gt=0, description="Target mesh width as a fraction of l_minus")

    # Bounds
    edge_constant: float = Field(default=1.0, gt=0, description="Constant C of the per-edge Dirichlet bound")


# Create global settings instance
settings = Settings()
