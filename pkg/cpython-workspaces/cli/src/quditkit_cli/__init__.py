"""quditkit_cli: the ``quditkit`` command line."""
