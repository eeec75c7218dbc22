class CrystalConventions:
    """ This class defines the constants used within the crystalspectra package """

    # Definition document
    DIMENSION = u"dimension"
    VERTICES = u"vertices"
    EDGES = u"edges"
    ID = u"id"
    M0 = u"m0"
    R0 = u"r0"
    FROM = u"from"
    TO = u"to"
    INDEX = u"index"

    # Perturbation document
    POTENTIAL_SHORT = u"potential_short"
    POTENTIAL_LONG = u"potential_long"
    VERTEX_MEASURE_DELTA = u"vertex_measure_delta"
    EDGE_MEASURE_DELTA = u"edge_measure_delta"
    CELL = u"cell"
    VERTEX = u"vertex"
    EDGE = u"edge"
    VALUE = u"value"
    ENVELOPE = u"envelope"
    POWER_LAW = u"power-law"
    AMPLITUDE = u"amplitude"
    EXPONENT = u"exponent"
    COEFFICIENTS = u"coefficients"
    TABLE = u"table"

    # Threshold kinds
    BAND_MIN = u"band-min"
    BAND_MAX = u"band-max"
    SADDLE = u"saddle"
    CROSSING = u"crossing"
    FLAT_BAND = u"flat-band"

    # Spectral projection methods
    EIGEN = u"eigen"
    RIESZ = u"riesz"

    # Propagation methods
    CHEBYSHEV = u"chebyshev"
    DENSE_EXP = u"dense-exp"

    # Boxes
    TORUS = u"torus"
    TRUNCATED = u"truncated"

    # Decay checks
    SHORT = u"short"
    LONG = u"long"
    CONVERGENT = u"convergent-evidence"
    DIVERGENT = u"divergent-evidence"
    INCONCLUSIVE = u"inconclusive"

    # Builtin crystals
    BUILTIN_PREFIX = u"builtin:"
    ZD1 = u"zd:1"
    ZD2 = u"zd:2"
    ZD3 = u"zd:3"
    HEXAGONAL = u"hexagonal"
    KAGOME = u"kagome"
    DIAMOND_CHAIN = u"diamond-chain"

    # Environment
    THREADS_ENV = u"CRYSTAL_SPECTRA_THREADS"
