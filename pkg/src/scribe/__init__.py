"""scribe: interactive SPARQL query assistance.

The engine caches predicates and literals from RDF endpoints, indexes
them for live auto-completion, and suggests semantically close
alternative queries (term substitution and structural relaxation) after
every execution.
"""

__version__ = "0.1.0"
