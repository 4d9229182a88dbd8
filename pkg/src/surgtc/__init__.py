"""
Module principal de l'application surgtc.

Ce module expose la version du paquet. La correction temporelle des
étiquettes se trouve dans ``surgtc.domain.services``.
"""

__version__ = "0.1.0"
