"""Exact toolkit for fixed points of finite abelian group actions on character varieties."""

__version__ = "0.1.0"
