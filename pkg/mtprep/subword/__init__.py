"""
Subword models: BPE and Unigram training, encoding, decoding and
vocabulary export.
"""
from .bpe import BpeModel, apply_merges, encode_bpe, train_bpe
from .model_io import load_model, save_model
from .pieces import (BYTE_PIECES, SPECIALS, UNK, byte_fallback_pieces,
                     decode_pieces, is_byte_piece, normalize_ws)
from .unigram import (UnigramModel, em_step, encode_unigram_viterbi,
                      log_likelihood, sample_unigram, sample_segment,
                      train_unigram, viterbi_segment)
from .vocab import (VocabFormat, Vocabulary, export_vocab, oov_rate, read_vocab,
                    vocabulary)
from .words import (DEFAULT_MARKER, ModelType, SubwordTrainConfig,
                    prepare_words)


def train_subword(lines, config):
    """Train the model type named by ``config.model_type``."""
    if config.model_type is ModelType.BPE:
        return train_bpe(lines, config)
    return train_unigram(lines, config)


def encode(model, text, dropout_p=0.0, alpha=None, seed=None, rng=None,
           on_unknown="unk"):
    """
    Segment text with either model type.

    Parameters
    ----------
    dropout_p : float
        BPE only: merge dropout probability.

    alpha : float, optional
        Unigram only: sample with this smoothing instead of taking the
        Viterbi segmentation.

    on_unknown : {"unk", "error"}
        Unigram only: see encode_unigram_viterbi.
    """
    if model.model_type is ModelType.BPE:
        return encode_bpe(model, text, dropout_p, seed, rng)
    if alpha is not None:
        return sample_unigram(model, text, alpha, seed, rng, on_unknown)
    return encode_unigram_viterbi(model, text, on_unknown)
