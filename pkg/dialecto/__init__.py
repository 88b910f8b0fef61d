"""dialecto: country-of-origin classification of French web text."""

__version__ = "0.1.0"
