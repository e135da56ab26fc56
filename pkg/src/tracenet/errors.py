class TracenetError(Exception):
    pass


class ConfigurationError(TracenetError, ValueError):
    pass


class ParseError(TracenetError, ValueError):
    def __init__(self, line_number, message):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class RejectedRecordError(ParseError):
    pass


class UndefinedInputError(TracenetError, ValueError):
    pass
