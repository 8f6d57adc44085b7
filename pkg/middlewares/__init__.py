"""Middlewares package"""
from .artifacts import ArtifactMiddleware

__all__ = ["ArtifactMiddleware"]
