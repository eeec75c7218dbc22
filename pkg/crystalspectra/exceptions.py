# !/usr/bin/python
# Filename: exceptions.py


class CrystalDefinitionError(ValueError):
    """ A definition or perturbation document could not be parsed """

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = "{0}: {1}".format(location, message)
        super(CrystalDefinitionError, self).__init__(message)


class CrystalValidationError(ValueError):
    """ A quotient graph or a perturbation violates an invariant """

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super(CrystalValidationError, self).__init__("; ".join(self.diagnostics))


class UnknownCrystalError(KeyError):
    """ No builtin crystal with this name """
    pass


class MeasureError(ValueError):
    """ A perturbed measure is not strictly positive """
    pass


class ProvenanceError(ValueError):
    """ An operator was not built from the crystal / perturbation it is used with """
    pass


class ConfigurationError(ValueError):
    """ Invalid run configuration or environment """
    pass


class DimensionLimitError(ValueError):
    """ The requested dense method is refused at this dimension """
    pass


class NumericalError(ArithmeticError):
    """ A numerical kernel failed (e.g. the eigensolver did not converge) """

    def __init__(self, message, xi=None):
        self.xi = xi
        if xi is not None:
            message = "{0} (xi={1})".format(message, list(xi))
        super(NumericalError, self).__init__(message)


class ContourError(NumericalError):
    """ The Riesz contour passes too close to an eigenvalue """

    def __init__(self, message, eigenvalue=None, xi=None):
        self.eigenvalue = eigenvalue
        if eigenvalue is not None:
            message = "{0}: eigenvalue {1!r}".format(message, eigenvalue)
        super(ContourError, self).__init__(message, xi=xi)
