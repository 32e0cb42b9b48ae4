"""Extraction heuristics: trigger splits, number/word normalization, sentence
segmentation, and the unparseable-instance filter."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cotverify import (
    AnswerFormat,
    ExtractionMethod,
    TriggerTable,
    extract_last_number,
    extract_response,
    filter_unparseable,
    load_default_triggers,
    normalize_answer,
    normalize_binary,
    normalize_choice,
    split_by_trigger,
    split_sentences,
)

from conftest import make_instance, make_response


class TestSplitByTrigger:
    def test_paper_style_split(self):
        got = split_by_trigger("First, X. Second, Y. The answer is 6.", ["The answer is"])
        assert got == ("First, X. Second, Y.", "6.")

    def test_no_trigger_is_absent(self):
        assert split_by_trigger("no trigger here", ["The answer is"]) is None

    def test_splits_at_last_occurrence(self):
        text = "The answer is probably wrong. Let me redo it. The answer is 42."
        # brute force: collect every occurrence, the chosen split must be the
        # final one
        needle = "the answer is"
        lowered = text.lower()
        occurrences = []
        start = 0
        while (pos := lowered.find(needle, start)) >= 0:
            occurrences.append(pos)
            start = pos + 1
        assert len(occurrences) == 2
        rationale, answer = split_by_trigger(text, ["The answer is"])
        assert answer == "42."
        assert rationale == text[: occurrences[-1]].strip()

    def test_earliest_matching_trigger_wins(self):
        text = "Therefore, it is six. The answer is 6."
        # "The answer is" is listed first, so it wins even though
        # "Therefore," also occurs (and occurs earlier in the text).
        rationale, answer = split_by_trigger(text, ["The answer is", "Therefore,"])
        assert answer == "6."
        rationale, answer = split_by_trigger(text, ["Therefore,", "The answer is"])
        assert answer == "it is six. The answer is 6."

    def test_case_insensitive(self):
        assert split_by_trigger("so the answer is x", ["The answer is"]) == ("so", "x")

    def test_empty_trigger_list_rejected(self):
        with pytest.raises(ValueError):
            split_by_trigger("text", [])


class TestExtractLastNumber:
    def test_trailing_period_is_punctuation(self):
        assert extract_last_number("The regular price of the popcorn is $5. ") == "5"

    def test_full_sentence_final_number(self):
        assert extract_last_number("which would be 70.") == "70"

    def test_no_digits(self):
        assert extract_last_number("no digits") is None

    def test_decimal_kept_commas_stripped(self):
        assert extract_last_number("costs $3.50") == "3.50"
        assert extract_last_number("a city of 146,606 inhabitants") == "146606"

    def test_takes_last_of_many(self):
        text = "Jame is 27 now, so in 8 years he will be 35. His cousin will be 5 years younger than twice his age, which would be 70."
        assert extract_last_number(text) == "70"

    @settings(max_examples=120)
    @given(st.text(max_size=60))
    def test_never_ends_with_period(self, text):
        got = extract_last_number(text)
        assert got is None or not got.endswith(".")


class TestNormalizeBinary:
    def test_yes_with_unrelated_tail(self):
        assert normalize_binary("Yes. Too much vitamin C can cause diarrhea, nausea and stomach cramps.") == "yes"

    def test_both_words_void(self):
        assert normalize_binary("This question cannot be answered with a yes or no answer.") == ""

    def test_neither_word_void(self):
        assert normalize_binary("maybe") == ""

    def test_no_with_negations_elsewhere(self):
        assert normalize_binary("No. Twinkies are not considered artisan made products.") == "no"

    def test_custom_vocab(self):
        assert normalize_binary("Therefore: SAME.", ("same", "different")) == "same"

    def test_vocab_must_be_lowercase_distinct(self):
        with pytest.raises(ValueError):
            normalize_binary("x", ("Yes", "no"))
        with pytest.raises(ValueError):
            normalize_binary("x", ("yes", "yes"))

    @settings(max_examples=100)
    @given(st.text(max_size=50))
    def test_idempotent_and_case_insensitive(self, text):
        once = normalize_binary(text)
        assert normalize_binary(once) == once if once else True
        assert normalize_binary(text.upper()) == once


class TestNormalizeChoice:
    def test_parenthesized_choice(self):
        assert normalize_choice("The answer is (B).", ("A", "B", "C", "D")) == "B"

    def test_two_choices_void(self):
        assert normalize_choice("Either A or B could work.", ("A", "B", "C", "D")) == ""

    def test_colon_form(self):
        assert normalize_choice("Answer: D", ("A", "B", "C", "D")) == "D"

    def test_case_sensitive_labels_skip_articles(self):
        # the article "a" must not count as choice A
        assert normalize_choice("It is a formula. The answer is (B).", ("A", "B", "C", "D")) == "B"


class TestSplitSentences:
    def test_basic(self):
        assert split_sentences("First, A. Second, B.") == ("First, A.", "Second, B.")

    def test_digit_period_not_boundary(self):
        assert split_sentences("costs $3.50 today. Done.") == ("costs $3.50 today.", "Done.")

    def test_question_and_bang(self):
        assert split_sentences("Really? Yes! Done.") == ("Really?", "Yes!", "Done.")

    def test_unterminated_tail_kept(self):
        assert split_sentences("First, A. trailing words") == ("First, A.", "trailing words")

    def test_empty(self):
        assert split_sentences("") == ()
        assert split_sentences("   ") == ()

    @settings(max_examples=100)
    @given(st.text(max_size=80))
    def test_concatenation_preserves_non_whitespace(self, text):
        joined = " ".join(split_sentences(text))
        strip = lambda s: "".join(s.split())
        assert strip(joined) == strip(text)


class TestExtractResponse:
    def test_trigger_happy_path(self):
        raw = "First, there are 15 trees. Second, 6 were planted. The answer is 6."
        out = extract_response(raw, AnswerFormat.NUMERIC)
        assert out.method_used is ExtractionMethod.TRIGGER
        assert out.answer == "6"
        assert out.rationale == ("First, there are 15 trees.", "Second, 6 were planted.")
        assert not out.atypical

    def test_last_number_fallback(self):
        raw = "First, there were originally 9 computers. Second, 5 * 4 = 20 were added. Fourth, 9 + 20 is 29."
        out = extract_response(raw, AnswerFormat.NUMERIC)
        assert out.method_used is ExtractionMethod.LAST_NUMBER
        assert out.answer == "29"
        assert not out.atypical

    def test_trigger_presence_ignores_fallbacks(self):
        raw = "The total is 12 apples. The answer is seven."
        out = extract_response(raw, AnswerFormat.NUMERIC)
        # no digits after the trigger: the answer is void, but the method
        # stays "trigger" rather than falling back to the last number
        assert out.method_used is ExtractionMethod.TRIGGER
        assert out.answer == ""

    def test_free_form_without_trigger_is_atypical(self):
        out = extract_response("Rambling text with no marker.", AnswerFormat.FREE_FORM)
        assert out.method_used is ExtractionMethod.MANUAL_MARKER
        assert out.atypical
        assert out.answer == ""

    def test_binary_scan_fallback(self):
        out = extract_response("Yes. Hamsters are prey animals.", AnswerFormat.BINARY)
        assert out.method_used is ExtractionMethod.NORMALIZE_SCAN
        assert out.answer == "yes"

    def test_binary_scan_ambiguity_is_void_not_atypical(self):
        out = extract_response("Could be yes, could be no.", AnswerFormat.BINARY)
        assert out.method_used is ExtractionMethod.NORMALIZE_SCAN
        assert out.answer == ""
        assert not out.atypical

    def test_binary_scan_nothing_found_is_atypical(self):
        out = extract_response("Entirely unrelated words.", AnswerFormat.BINARY)
        assert out.method_used is ExtractionMethod.MANUAL_MARKER
        assert out.atypical

    def test_llm_specific_triggers_apply(self):
        table = load_default_triggers()
        raw = "First, 40% of the population is boys. Therefore, 360"
        out = extract_response(raw, AnswerFormat.NUMERIC, table, "GSM8K", "Gemini Pro")
        assert out.method_used is ExtractionMethod.TRIGGER
        assert out.answer == "360"


class TestFilterUnparseable:
    def _instance_with_void_count(self, void: int):
        responses = [
            make_response([f"Sentence {k}."], "" if k < void else f"ans{k}") for k in range(5)
        ]
        return make_instance(f"inst-void-{void}", responses, gold=["zz"])

    def test_four_of_five_dropped(self):
        kept, dropped = filter_unparseable([self._instance_with_void_count(4)])
        assert not kept and len(dropped) == 1

    def test_zero_failures_kept(self):
        kept, dropped = filter_unparseable([self._instance_with_void_count(0)])
        assert len(kept) == 1 and not dropped

    def test_boundary_three_of_five_kept(self):
        # the rule is strictly "over 3", so exactly 3 failures stays in
        kept, dropped = filter_unparseable([self._instance_with_void_count(3)])
        assert len(kept) == 1 and not dropped

    def test_custom_predicate(self):
        instance = self._instance_with_void_count(0)
        kept, dropped = filter_unparseable([instance], max_failures=3, is_failure=lambda r: True)
        assert not kept and dropped == [instance]


def test_normalize_answer_case_space_punctuation():
    assert normalize_answer("  American.  ") == "american"
    assert normalize_answer('"The January Man"') == "the january man"
    assert normalize_answer("x   y") == "x y"
    assert normalize_answer("") == ""
