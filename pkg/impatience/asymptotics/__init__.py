"""Desk-scale statistical checks of the large-backlog limits."""
