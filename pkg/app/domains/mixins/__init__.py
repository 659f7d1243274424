from app.domains.mixins.arrays import ArrayModel

__all__ = ['ArrayModel']
