from beta_hankel.base.report import Report, DictGenerator, IterVal, plain
__all__ = ['Report', 'DictGenerator', 'IterVal', 'plain']
