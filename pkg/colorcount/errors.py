#
#   Exceptions raised by the counting structures and the tools.
#


class ColorCountError(Exception):
    """
    Base class of all errors raised by colorcount.

    Every subclass carries a stable error code that the commandline
    tools print.
    """

    code = "ERROR"

    def __init__(self, msg):
        super(ColorCountError, self).__init__(msg)
        self.msg = msg

    def __str__(self):
        return "{0}: {1}".format(self.code, self.msg)


class SuitabilityError(ColorCountError, RuntimeError):
    """
    No suitable random sample was found within the attempt cap.
    """

    code = "BUILD_FAILED_SUITABILITY"

    def __init__(self, msg, attempts):
        super(SuitabilityError, self).__init__(msg)
        self.attempts = attempts


class QueryOutOfGridError(ColorCountError, ValueError):
    code = "QUERY_OUT_OF_GRID"


class QueryMalformedError(ColorCountError, ValueError):
    code = "QUERY_MALFORMED"


class SettingUnsupportedError(ColorCountError, NotImplementedError):
    code = "SETTING_UNSUPPORTED"


class DatasetIOError(ColorCountError, OSError):
    code = "IO"


class BadParamsError(ColorCountError, ValueError):
    code = "BAD_PARAMS"
