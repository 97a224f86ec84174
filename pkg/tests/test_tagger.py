import pytest

import synthdata
from mirth.errors import DataError
from mirth.tagger import PUNCT_TAG, PerceptronTagger, read_conllu
from mirth.text import tokenize


def tag_surfaces(tagger, text):
    return [tt.pos for tt in tagger.predict(tokenize(text))]


def test_memorizes_single_sentence_in_one_epoch():
    tagger = PerceptronTagger(epochs=1, seed=3).fit([[("de", "DET"), ("muur", "NOUN")]])
    assert tag_surfaces(tagger, "de muur") == ["DET", "NOUN"]


def test_empty_training_data_errors():
    with pytest.raises(ValueError):
        PerceptronTagger().fit([])
    with pytest.raises(ValueError):
        PerceptronTagger().fit([[("de", "")]])


def test_empty_input_and_punct_rule(trained_tagger):
    assert trained_tagger.predict([]) == []
    assert tag_surfaces(trained_tagger, "!") == [PUNCT_TAG]


def test_suffix_generalizes_to_unseen_word():
    # Every -heid word in training is a NOUN; an unseen -heid word should be too.
    sentences = [
        [("de", "DET"), ("snelheid", "NOUN"), ("telt", "VERB")],
        [("de", "DET"), ("waarheid", "NOUN"), ("telt", "VERB")],
        [("de", "DET"), ("wijsheid", "NOUN"), ("wint", "VERB")],
        [("een", "DET"), ("ziekte", "NOUN"), ("komt", "VERB")],
        [("hij", "PRON"), ("telt", "VERB"), ("snel", "ADJ")],
    ] * 3
    tagger = PerceptronTagger(epochs=5, seed=1).fit(sentences)
    tags = tagger.predict_words(["de", "blijheid", "telt"])
    assert tags[1] == "NOUN"


def test_training_accuracy_on_own_data(trained_tagger, synth_paths):
    sentences = read_conllu(synth_paths["conllu"])
    correct = total = 0
    for sent in sentences[:300]:
        words = [w for w, _ in sent]
        gold = [t for _, t in sent]
        pred = trained_tagger.predict_words(words)
        correct += sum(p == g for p, g in zip(pred, gold))
        total += len(gold)
    assert correct / total >= 0.95


def test_kermit_regression_fixture(trained_tagger):
    # Pinned expectation under the bundled synthetic training corpus.
    assert tag_surfaces(trained_tagger, "Kermit de sticker") == ["PROPN", "DET", "NOUN"]
    assert tag_surfaces(trained_tagger, "Wat is groen en plakt aan de muur?") == [
        "PRON", "AUX", "ADJ", "CCONJ", "VERB", "ADP", "DET", "NOUN", PUNCT_TAG,
    ]


def test_determinism(synth_paths):
    sentences = read_conllu(synth_paths["conllu"])[:100]
    a = PerceptronTagger(epochs=3, seed=5).fit(sentences)
    b = PerceptronTagger(epochs=3, seed=5).fit(sentences)
    assert a.weights_ == b.weights_
    assert a.lexicon_ == b.lexicon_


def test_tag_closure(trained_tagger):
    allowed = set(trained_tagger.tagset_) | {PUNCT_TAG}
    for text in synthdata.make_jokes(40, seed=99):
        assert set(tag_surfaces(trained_tagger, text)) <= allowed


class TestPersistence:
    def test_roundtrip_tags_identically(self, trained_tagger, tmp_path):
        path = tmp_path / "model.tagger"
        trained_tagger.save(path)
        loaded = PerceptronTagger.load(path)
        for text in synthdata.make_jokes(100, seed=4):
            tokens = tokenize(text)
            assert [t.pos for t in loaded.predict(tokens)] == [
                t.pos for t in trained_tagger.predict(tokens)
            ]

    def test_file_format(self, trained_tagger, tmp_path):
        path = tmp_path / "model.tagger"
        trained_tagger.save(path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "MIRTH-TAGGER v1"
        assert lines[1].startswith("tagset\t")
        kinds = {line.split("\t")[0] for line in lines[2:-1]}
        assert kinds <= {"lexicon", "weight"}
        assert lines[-1] == "end"
        for line in lines[2:-1]:
            fields = line.split("\t")
            if fields[0] == "weight":
                float(fields[3])  # parses at full precision

    def test_truncated_file_errors(self, trained_tagger, tmp_path):
        path = tmp_path / "model.tagger"
        trained_tagger.save(path)
        content = path.read_text(encoding="utf-8").splitlines()[:-3]
        path.write_text("\n".join(content), encoding="utf-8")
        with pytest.raises(DataError, match="truncated"):
            PerceptronTagger.load(path)

    def test_malformed_record_names_line(self, tmp_path):
        path = tmp_path / "model.tagger"
        path.write_text(
            "MIRTH-TAGGER v1\ntagset\tNOUN\nweight\tonly-two\nend\n", encoding="utf-8"
        )
        with pytest.raises(DataError, match=":3"):
            PerceptronTagger.load(path)

    def test_wrong_header_errors(self, tmp_path):
        path = tmp_path / "model.tagger"
        path.write_text("something else\n", encoding="utf-8")
        with pytest.raises(DataError, match="not a MIRTH-TAGGER"):
            PerceptronTagger.load(path)


class TestConllu:
    def test_reads_synthetic_file(self, synth_paths):
        sentences = read_conllu(synth_paths["conllu"])
        assert len(sentences) > 700
        assert all(sentences)

    def test_skips_comments_ranges_and_empty_nodes(self, tmp_path):
        path = tmp_path / "a.conllu"
        path.write_text(
            "# comment\n"
            "1-2\tdat's\t_\t_\t_\t_\t_\t_\t_\t_\n"
            "1\tdat\t_\tPRON\t_\t_\t_\t_\t_\t_\n"
            "1.1\tgap\t_\tX\t_\t_\t_\t_\t_\t_\n"
            "2\tis\t_\tAUX\t_\t_\t_\t_\t_\t_\n"
            "\n"
            "1\tja\t_\tINTJ\t_\t_\t_\t_\t_\t_\n",
            encoding="utf-8",
        )
        assert read_conllu(path) == [[("dat", "PRON"), ("is", "AUX")], [("ja", "INTJ")]]

    def test_malformed_line_errors(self, tmp_path):
        path = tmp_path / "bad.conllu"
        path.write_text("1\tonly-form\n", encoding="utf-8")
        with pytest.raises(DataError, match=":1"):
            read_conllu(path)

    def test_empty_file_errors(self, tmp_path):
        path = tmp_path / "empty.conllu"
        path.write_text("# nothing\n", encoding="utf-8")
        with pytest.raises(DataError, match="no tagged sentences"):
            read_conllu(path)
