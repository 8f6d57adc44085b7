"""Database package"""
from .models import (
    Database,
    EigenCacheRepository,
    pair_digest
)

__all__ = [
    "Database",
    "EigenCacheRepository",
    "pair_digest"
]
