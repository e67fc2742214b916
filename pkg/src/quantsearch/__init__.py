"""quantsearch: extract quantities from text, parse what they measure,
and answer value-seeking queries with evidence."""

__version__ = "0.1.0"
