"""
Module d'initialisation du paquet.
"""
