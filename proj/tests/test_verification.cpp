#include <doctest.h>

#include <random>

#include "discussrag/answer_extract.hpp"
#include "discussrag/verification.hpp"
#include "support.hpp"

using namespace discussrag;
using testsupport::make_query;
using testsupport::reply;

namespace {

struct Rig {
  PromptLibrary prompts = PromptLibrary::defaults();
  AnswerEngine engine{prompts, "test-model"};
  Query query = make_query();
  DistilledSummary distilled{"coronary venous drainage background", true, ""};

  std::vector<Snippet> snippets = {
      {"cardio#000000", "cardio", "The coronary sinus drains the myocardium.", "Cardiac veins",
       0.91},
      {"renal#000000", "renal", "Renal venous blood keeps a high oxygen content.",
       "Renal circulation", 0.78},
  };
};

}  // namespace

TEST_CASE("an empty retrieval is rejected without consulting the backend") {
  Rig rig;
  ScriptedGateway gateway(std::vector<FixtureEntry>{});
  const auto verdict = rig.engine.judge_snippets(rig.distilled, rig.query, {}, gateway);
  CHECK_FALSE(verdict.accepted);
  CHECK(verdict.rationale == "no snippets retrieved");
  CHECK(gateway.entries_consumed() == 0);
}

TEST_CASE("accept and reject verdicts are read from the first word") {
  Rig rig;
  ScriptedGateway accept(std::vector<FixtureEntry>{
      reply("ACCEPT \xe2\x80\x94 the snippets cover the mechanism directly.")});
  auto verdict = rig.engine.judge_snippets(rig.distilled, rig.query, rig.snippets, accept);
  CHECK(verdict.accepted);
  CHECK(verdict.rationale == "the snippets cover the mechanism directly.");

  ScriptedGateway lowercase(std::vector<FixtureEntry>{reply("accept: relevant enough")});
  verdict = rig.engine.judge_snippets(rig.distilled, rig.query, rig.snippets, lowercase);
  CHECK(verdict.accepted);
  CHECK(verdict.rationale == "relevant enough");

  ScriptedGateway reject(std::vector<FixtureEntry>{
      reply("REJECT - off topic\nSecond line is dropped.")});
  verdict = rig.engine.judge_snippets(rig.distilled, rig.query, rig.snippets, reject);
  CHECK_FALSE(verdict.accepted);
  CHECK(verdict.rationale == "off topic");

  ScriptedGateway bare(std::vector<FixtureEntry>{reply("ACCEPT")});
  verdict = rig.engine.judge_snippets(rig.distilled, rig.query, rig.snippets, bare);
  CHECK(verdict.accepted);
  CHECK(verdict.rationale == "(none given)");
}

TEST_CASE("the judge sees the question, background, and numbered snippets") {
  Rig rig;
  ScriptedGateway gateway(std::vector<FixtureEntry>{reply("ACCEPT fine")});
  rig.engine.judge_snippets(rig.distilled, rig.query, rig.snippets, gateway);

  const std::string prompt = gateway.request_log()[0].messages[1].content;
  CHECK(prompt.find(rig.query.stem) != std::string::npos);
  CHECK(prompt.find(rig.distilled.content) != std::string::npos);
  CHECK(prompt.find("[1] The coronary sinus drains the myocardium.") != std::string::npos);
  CHECK(prompt.find("[2] Renal venous blood keeps a high oxygen content.") !=
        std::string::npos);
}

TEST_CASE("an empty background renders as a placeholder in the judge prompt") {
  Rig rig;
  rig.distilled.content = "";
  ScriptedGateway gateway(std::vector<FixtureEntry>{reply("REJECT nothing to stand on")});
  rig.engine.judge_snippets(rig.distilled, rig.query, rig.snippets, gateway);
  CHECK(gateway.request_log()[0].messages[1].content.find("Background summary:\n(none)") !=
        std::string::npos);
}

TEST_CASE("an unreadable verdict gets one correction and at most two calls") {
  Rig rig;
  ScriptedGateway gateway(std::vector<FixtureEntry>{reply("maybe? hard to say"),
                                                    reply("REJECT weak grounding")});
  const auto verdict = rig.engine.judge_snippets(rig.distilled, rig.query, rig.snippets, gateway);
  CHECK_FALSE(verdict.accepted);
  CHECK(verdict.rationale == "weak grounding");
  CHECK(gateway.entries_consumed() == 2);
  REQUIRE(gateway.request_log().size() == 2);
  CHECK(gateway.request_log()[1].messages.size() == 4);
  CHECK(gateway.request_log()[1].messages[2].content == "maybe? hard to say");

  ScriptedGateway hopeless(std::vector<FixtureEntry>{reply("hmm"), reply("hmm again")});
  CHECK_THROWS_AS(rig.engine.judge_snippets(rig.distilled, rig.query, rig.snippets, hopeless),
                  VerdictParseError);
}

TEST_CASE("snippet rendering numbers entries and handles the empty case") {
  Rig rig;
  const std::string rendered = AnswerEngine::render_snippets(rig.snippets);
  CHECK(rendered == "[1] The coronary sinus drains the myocardium.\n"
                    "[2] Renal venous blood keeps a high oxygen content.");
  CHECK(AnswerEngine::render_snippets({}) == "(none)");
}

TEST_CASE("grounded answering includes snippets and options in the prompt") {
  Rig rig;
  ScriptedGateway gateway(std::vector<FixtureEntry>{
      reply("The coronary sinus carries the most desaturated blood.\nAnswer: (B)")});
  const Answer answer = rig.engine.answer_with_context(rig.query, rig.snippets, gateway);
  CHECK(answer.choice == "B");
  CHECK(answer.strategy == AnswerStrategy::rag);
  CHECK(answer.raw_generation.find("desaturated") != std::string::npos);

  const std::string prompt = gateway.request_log()[0].messages[1].content;
  CHECK(prompt.find("The coronary sinus drains the myocardium.") != std::string::npos);
  CHECK(prompt.find(rig.query.stem) != std::string::npos);
  CHECK(prompt.find("(A) Renal vein") != std::string::npos);
  CHECK(prompt.find("(D) Internal jugular vein") != std::string::npos);
}

TEST_CASE("the fallback path reasons without any snippet text") {
  Rig rig;
  ScriptedGateway gateway(std::vector<FixtureEntry>{reply("Answer: (C)")});
  const Answer answer = rig.engine.answer_with_cot(rig.query, gateway);
  CHECK(answer.choice == "C");
  CHECK(answer.strategy == AnswerStrategy::cot_fallback);

  const std::string prompt = gateway.request_log()[0].messages[1].content;
  CHECK(prompt.find("coronary sinus drains") == std::string::npos);
  CHECK(prompt.find(rig.query.stem) != std::string::npos);
  CHECK(prompt.find("(B) Coronary sinus") != std::string::npos);
}

TEST_CASE("an unparseable answer is corrected once, then surfaces with its text") {
  Rig rig;
  ScriptedGateway gateway(std::vector<FixtureEntry>{reply("I truly cannot decide."),
                                                    reply("On reflection: Answer: (D)")});
  const Answer answer = rig.engine.answer_with_context(rig.query, rig.snippets, gateway);
  CHECK(answer.choice == "D");
  CHECK(gateway.entries_consumed() == 2);
  CHECK(gateway.request_log()[1].messages.size() == 4);

  ScriptedGateway hopeless(std::vector<FixtureEntry>{reply("no label here"),
                                                     reply("and none here either")});
  try {
    rig.engine.answer_with_cot(rig.query, hopeless);
    FAIL("expected AnswerParseError");
  } catch (const AnswerParseError& ex) {
    CHECK(ex.raw_generation() == "and none here either");
    CHECK(ex.strategy() == AnswerStrategy::cot_fallback);
  }
}

TEST_CASE("choice extraction prefers the last explicit answer line") {
  const Query query = make_query();
  CHECK(extract_choice("Answer: (B)", query) == "B");
  CHECK(extract_choice("ANSWER:C", query) == "C");
  CHECK(extract_choice("answer : ( d )", query) == "D");
  CHECK(extract_choice("Answer: (A). Hmm, no. Answer: (B)", query) == "B");
  CHECK(extract_choice("Answer: (Z)\nB", query) == "B");
}

TEST_CASE("choice extraction falls back to a label on its own line") {
  const Query query = make_query();
  CHECK(extract_choice("Step one.\nStep two.\n(C).", query) == "C");
  CHECK(extract_choice("Reasoning...\nb", query) == "B");
  CHECK(extract_choice("nothing useful at all", query) == std::nullopt);
  CHECK(extract_choice("", query) == std::nullopt);
}

TEST_CASE("bare-word matching is reserved for word labels") {
  Query yesno;
  yesno.stem = "Is the treatment effective?";
  yesno.options = {{"yes", "yes"}, {"no", "no"}, {"maybe", "maybe"}};
  CHECK(extract_choice("The answer is yes.", yesno) == "yes");
  CHECK(extract_choice("It is unclear, maybe.", yesno) == "maybe");
  CHECK(extract_choice("No, although early data said yes.", yesno) == "yes");

  // Single-letter labels never match inside prose.
  const Query lettered = make_query();
  CHECK(extract_choice("A colonoscopy would be advised here", lettered) == std::nullopt);
}

TEST_CASE("extraction never invents a label outside the option set") {
  const Query query = make_query();
  std::mt19937_64 rng(99);
  const std::string alphabet = "abcdefghij ():.\nANSWER";
  for (int trial = 0; trial < 200; ++trial) {
    std::string raw;
    const size_t length = rng() % 60;
    for (size_t i = 0; i < length; ++i) raw.push_back(alphabet[rng() % alphabet.size()]);
    const auto choice = extract_choice(raw, query);
    if (choice) CHECK(query.has_label(*choice));
  }
}
