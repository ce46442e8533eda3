from .memory_bank import MemoryBank, init_bank

__all__ = [
    'MemoryBank',
    'init_bank'
]
