"""Pydantic schemas for configuration records, feed answers, metrics and reports."""
from pydantic import BaseModel


class Message(BaseModel):
    message: str
