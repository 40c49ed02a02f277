"""calculi: a workbench for five lambda calculi.

Modules:
    untyped     terms, substitution, beta/eta reduction, reduction graphs
    encodings   Church booleans, numerals, pairs, lists, trees, fixed points
    combinatory SKI terms, bracket abstraction, translations both ways
    stlc        simply typed terms, type checking, derivations, typed reduction
    infer       unification and principal type inference
    models      finite set-theoretic interpretation
    systemf     polymorphic terms, long normal forms, impredicative encodings
    pcf         PCF typing and operational semantics
    pcfdenot    approximated domain semantics for PCF
    cli         text syntax and the command-line front end
"""

__version__ = "0.1.0"
