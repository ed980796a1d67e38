"""
Exceptions raised by mtprep.

Library code raises these; ``mtprep.mtprepUtils`` turns them into exit
codes and one-line messages on standard error.
"""


class MtprepError(Exception):
    """Base class for every error raised by this package."""


class CorpusFormatError(MtprepError):
    """
    A corpus file violates the line-oriented format.

    Parameters
    ----------
    msg : str
        What went wrong.

    path : str, optional
        The offending file.

    lineno : int, optional
        1-based line number inside ``path``.
    """
    def __init__(self, msg, path=None, lineno=None):
        self.msg = msg
        self.path = path
        self.lineno = lineno
        super().__init__(str(self))

    def __str__(self):
        where = ""
        if self.path is not None:
            where = str(self.path)
            if self.lineno is not None:
                where += ":%d" % self.lineno
            where += ": "
        elif self.lineno is not None:
            where = "line %d: " % self.lineno
        return where + self.msg


class ConfigError(MtprepError):
    """Invalid configuration value, file or command-line combination."""


class TrainingError(MtprepError):
    """A subword model cannot be trained with the requested settings."""


class SegmentationError(MtprepError):
    """Input text cannot be segmented with the pieces of a model."""
    def __init__(self, char):
        self.char = char
        super().__init__("unsegmentable input: no piece covers %r (U+%04X)"
                         % (char, ord(char)))


class ExternalToolError(MtprepError):
    """An external tokenizer failed or broke the line protocol."""


class EvaluationError(MtprepError):
    """Hypothesis and reference streams cannot be scored together."""
