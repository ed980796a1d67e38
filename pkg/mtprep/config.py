"""
Layered pipeline configuration.

Values come from the packaged ``mtprep.cfg``, then an optional user file,
then command-line flags; later layers win key by key.  Everything is
checked when the PipelineConfig is built, so a bad value is reported once
with its section and key.
"""
import configparser
import enum
import logging
import os
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

from .cleaning import DedupKey, FilterConfig, LengthUnit
from .corpus import SplitSpec
from .errors import ConfigError
from .evaluation import MetricScheme
from .pretokenize import PretokenizerKind
from .subword.words import ModelType, SubwordTrainConfig

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = os.path.dirname(os.path.abspath(__file__)) + "/mtprep.cfg"


@dataclass(frozen=True)
class EncodeSettings:
    """How ``encode`` segments text; sampling needs a seed."""
    dropout: float = 0.0
    alpha: Optional[float] = None
    seed: Optional[int] = None
    workers: int = 1
    on_unknown: str = "unk"

    def __post_init__(self):
        if not 0.0 <= self.dropout <= 1.0:
            raise ConfigError("[encode] dropout must be in [0, 1], got %r"
                              % self.dropout)
        if self.alpha is not None and self.alpha <= 0:
            raise ConfigError("[encode] alpha must be positive, got %r" % self.alpha)
        if self.workers < 1:
            raise ConfigError("[encode] workers must be at least 1")
        if self.on_unknown not in ("unk", "error"):
            raise ConfigError("[encode] on_unknown must be unk or error, got %r"
                              % self.on_unknown)

    @property
    def sampling(self):
        return self.dropout > 0.0 or self.alpha is not None

    def require_seed(self):
        """The seed to sample with; refuses to invent one."""
        if self.sampling and self.seed is None:
            raise ConfigError("sampling (dropout or alpha) needs an explicit "
                              "--seed or [encode] seed")
        return self.seed

    def check_model_type(self, model_type):
        """Refuse sampling settings the model type cannot use."""
        if model_type is ModelType.BPE and self.alpha is not None:
            raise ConfigError("alpha samples Unigram segmentations; "
                              "this is a BPE model")
        if model_type is ModelType.UNIGRAM and self.dropout > 0.0:
            raise ConfigError("dropout applies to BPE merges; "
                              "this is a Unigram model")


@dataclass(frozen=True)
class PipelineConfig:
    """
    Every setting of the pipeline, typed and validated.

    ``sections`` keeps the layered raw text so ``override`` can rebuild
    the whole config with new values.
    """
    source_lang: str
    target_lang: str
    filter: FilterConfig
    split: SplitSpec
    subword: SubwordTrainConfig
    pretokenize_source: PretokenizerKind
    pretokenize_target: PretokenizerKind
    encode: EncodeSettings
    bleu: MetricScheme
    sections: Mapping[str, Mapping[str, str]] = field(repr=False, compare=False,
                                                      default_factory=dict)

    @classmethod
    def from_parser(cls, parser):
        get = _Getter(parser)
        kind_opts = dict(batch_size=get.int("pretokenize", "batch_size", 1),
                         workers=get.int("pretokenize", "workers", 1))
        subword = SubwordTrainConfig(
            model_type=get.enum("subword", "model_type", ModelType),
            vocab_size=get.int("subword", "vocab_size", 1),
            character_coverage=get.float("subword", "character_coverage"),
            byte_fallback=get.bool("subword", "byte_fallback"),
            split_digits=get.bool("subword", "split_digits"),
            seed=get.int("subword", "seed"),
            input_sentence_size=get.int("subword", "input_sentence_size", 1,
                                        optional=True),
            marker=get.raw("subword", "marker"),
            seed_vocab_size=get.int("unigram", "seed_vocab_size", 1, optional=True),
            max_piece_length=get.int("unigram", "max_piece_length", 1),
            em_iterations=get.int("unigram", "em_iterations", 1),
            prune_fraction=get.float("unigram", "prune_fraction"))
        filter_config = FilterConfig(
            max_length=get.int("clean", "max_length", 1),
            length_unit=get.enum("clean", "length_unit", LengthUnit),
            max_ratio=get.float("clean", "max_ratio"),
            dedup_key=get.enum("clean", "dedup_key", DedupKey),
            score_threshold=get.float("clean", "score_threshold", optional=True),
            source_copy_check=get.bool("clean", "source_copy_check"),
            pretokenize_source=get.kind("clean", "pretokenize_source"),
            pretokenize_target=get.kind("clean", "pretokenize_target"))
        split = SplitSpec(valid_count=get.int("split", "valid_count", 0),
                          test_count=get.int("split", "test_count", 0),
                          seed=get.int("split", "seed"))
        encode = EncodeSettings(
            dropout=get.float("encode", "dropout"),
            alpha=get.float("encode", "alpha", optional=True),
            seed=get.int("encode", "seed", optional=True),
            workers=get.int("encode", "workers", 1),
            on_unknown=get.raw("encode", "on_unknown"))
        epsilon = get.float("bleu", "epsilon")
        bleu = MetricScheme.parse(get.raw("bleu", "scheme"),
                                  get.raw("bleu", "smoothing"), epsilon)
        sections = {name: dict(parser.items(name)) for name in parser.sections()}
        return cls(source_lang=get.raw("corpus", "source_lang"),
                   target_lang=get.raw("corpus", "target_lang"),
                   filter=filter_config,
                   split=split,
                   subword=subword,
                   pretokenize_source=replace(get.kind("pretokenize", "source"),
                                              **kind_opts),
                   pretokenize_target=replace(get.kind("pretokenize", "target"),
                                              **kind_opts),
                   encode=encode,
                   bleu=bleu,
                   sections=sections)

    def override(self, section, **values):
        """
        A copy with some keys of one section replaced.

        ``None`` values are skipped, so unset command-line flags can be
        passed straight through.
        """
        if section not in self.sections:
            raise ConfigError("unknown configuration section [%s]" % section)
        parser = _parser()
        parser.read_dict(self.sections)
        changed = False
        for key, value in values.items():
            if value is None:
                continue
            if key not in self.sections[section]:
                raise ConfigError("unknown key %r in [%s]" % (key, section))
            parser.set(section, key, _to_text(value))
            changed = True
        if not changed:
            return self
        return PipelineConfig.from_parser(parser)


def _to_text(value):
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, enum.Enum):
        return str(value.value)
    return str(value)


def _parser():
    return configparser.ConfigParser(interpolation=None)


class _Getter:
    """Typed reads that turn every failure into a ConfigError."""
    def __init__(self, parser):
        self.parser = parser

    def raw(self, section, key):
        try:
            return self.parser.get(section, key)
        except (configparser.NoSectionError, configparser.NoOptionError):
            raise ConfigError("missing [%s] %s" % (section, key)) from None

    def call(self, section, key, convert, optional=False):
        value = self.raw(section, key)
        if optional and value == "":
            return None
        try:
            return convert(value)
        except ConfigError as e:
            raise ConfigError("[%s] %s: %s" % (section, key, e)) from None
        except ValueError:
            raise ConfigError("[%s] %s: bad value %r" % (section, key, value)) from None

    def int(self, section, key, minimum=None, optional=False):
        value = self.call(section, key, int, optional)
        if value is not None and minimum is not None and value < minimum:
            raise ConfigError("[%s] %s must be at least %d, got %d"
                              % (section, key, minimum, value))
        return value

    def float(self, section, key, optional=False):
        return self.call(section, key, float, optional)

    def bool(self, section, key):
        return self.call(section, key, _boolean)

    def enum(self, section, key, cls):
        return self.call(section, key, lambda v: cls(v.strip().lower().replace("-", "_")))

    def kind(self, section, key):
        return self.call(section, key, PretokenizerKind.parse)


def _boolean(text):
    states = configparser.ConfigParser.BOOLEAN_STATES
    if text.lower() not in states:
        raise ValueError(text)
    return states[text.lower()]


def load_config(path=None):
    """
    Read the packaged defaults and, optionally, a user file on top.

    Raises
    ------
    ConfigError
        The user file is missing or unreadable, or a value is invalid.
    """
    parser = _parser()
    with open(DEFAULT_CONFIG, encoding="utf-8") as f:
        parser.read_file(f)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as f:
                parser.read_file(f)
        except (OSError, UnicodeDecodeError, configparser.Error) as e:
            raise ConfigError("cannot read config %s: %s" % (path, e)) from None
        logger.info("Read configuration from %s", path)
    return PipelineConfig.from_parser(parser)
