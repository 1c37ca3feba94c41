#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "deid/masking.hpp"

using namespace deid;

namespace {

const std::vector<std::string> kFirst = {"Alice", "Bob", "Carol", "David",
                                         "Emma"};
const std::vector<std::string> kLast = {"Walker", "Young", "King", "Hill",
                                        "Scott"};
const std::vector<std::string> kProf = {"teacher", "baker", "pilot", "nurse"};

AnnotatedSpan span(size_t start, size_t end, EntityClass c,
                   std::string text = {}) {
  AnnotatedSpan s;
  s.start = start;
  s.end = end;
  s.entity_class = c;
  s.text = std::move(text);
  return s;
}

}  // namespace

TEST_CASE("redact emits a class placeholder or the fixed string") {
  CHECK(redact("John", EntityClass::NAME) == "XXX-NAME");
  CHECK(redact("foo", EntityClass::CONTACT) == "XXX-CONTACT");
  CHECK(redact("foo", EntityClass::NAME, "[GONE]") == "[GONE]");
  CHECK(keep("John Smith") == "John Smith");
}

// ---------------------------------------------------------------------------
// surrogate names
// ---------------------------------------------------------------------------

TEST_CASE("surrogate names are keyed draws") {
  CHECK(surrogate_name("John Smith", kFirst, kLast, 42, "d1") == "Alice King");
  CHECK(surrogate_name("JOHN", kFirst, kLast, 42, "d1") == "DAVID");
  CHECK(surrogate_name("John Smith", kFirst, kLast, 42, "d2") == "Emma Hill");
  CHECK(surrogate_name("John Smith", kFirst, kLast, 43, "d1") == "Emma Young");
}

TEST_CASE("one surrogate per name per document") {
  std::string a = surrogate_name("John Smith", kFirst, kLast, 9, "doc");
  std::string b = surrogate_name("John Smith", kFirst, kLast, 9, "doc");
  CHECK(a == b);
}

TEST_CASE("case variants of a name share picks and keep their style") {
  CHECK(surrogate_name("john smith", kFirst, kLast, 42, "d1") == "Alice King");
  CHECK(surrogate_name("JOHN SMITH", kFirst, kLast, 42, "d1") == "ALICE KING");
}

TEST_CASE("single-token names map to a first name only") {
  for (uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    std::string out = surrogate_name("Karen", kFirst, kLast, seed, "d");
    CHECK(out.find(' ') == std::string::npos);
  }
}

TEST_CASE("a surrogate never casefold-equals the original") {
  for (int i = 0; i < 200; ++i) {
    std::string doc = "doc-" + std::to_string(i);
    for (const std::string& name : kFirst) {
      std::string out = surrogate_name(name, kFirst, kLast, 5, doc);
      CHECK(uni::casefold(out) != uni::casefold(name));
    }
  }
}

TEST_CASE("surrogate names require nonempty lists") {
  CHECK_THROWS_AS(surrogate_name("x", {}, kLast, 1, "d"), error);
  CHECK_THROWS_AS(surrogate_name("x", kFirst, {}, 1, "d"), error);
}

TEST_CASE("profession surrogates swap within the list") {
  CHECK(surrogate_profession("lawyer", kProf, 42, "d1") == "baker");
  for (const std::string& p : kProf)
    CHECK(surrogate_profession(p, kProf, 11, "d") != p);
  CHECK(surrogate_profession("Nurse", kProf, 3, "d") != "nurse");
  CHECK_THROWS_AS(surrogate_profession("x", {}, 1, "d"), error);
}

// ---------------------------------------------------------------------------
// digit randomization
// ---------------------------------------------------------------------------

TEST_CASE("position specs parse last-n and all") {
  CHECK(PositionSpec::parse("last4")->last_n == 4);
  CHECK(PositionSpec::parse("last12")->last_n == 12);
  CHECK(PositionSpec::parse("all")->last_n == 0);
  CHECK_FALSE(PositionSpec::parse("last0"));
  CHECK_FALSE(PositionSpec::parse("last"));
  CHECK_FALSE(PositionSpec::parse("lastx"));
  CHECK_FALSE(PositionSpec::parse("first3"));
  CHECK_FALSE(PositionSpec::parse(""));
}

TEST_CASE("digit randomization replaces only the selected tail") {
  PositionSpec last4{4};
  auto out = randomize_digits("1234567890", last4, 7, "docA");
  REQUIRE(out);
  CHECK(*out == "1234568575");
  CHECK(out->substr(0, 6) == "123456");
}

TEST_CASE("single digit is redrawn until it changes") {
  PositionSpec all{0};
  auto out = randomize_digits("A1B", all, 7, "docA");
  REQUIRE(out);
  CHECK(*out == "A9B");
}

TEST_CASE("digit randomization preserves shape and non-digits") {
  PositionSpec last4{4};
  for (int i = 0; i < 100; ++i) {
    std::string doc = "doc-" + std::to_string(i);
    auto out = randomize_digits("416-555-2368", last4, 21, doc);
    REQUIRE(out);
    CHECK(out->size() == 12);
    CHECK(out->substr(0, 8) == "416-555-");
    CHECK(*out != "416-555-2368");
    CHECK(word_shape(*out) == word_shape("416-555-2368"));
  }
}

TEST_CASE("digit randomization is deterministic") {
  PositionSpec all{0};
  auto a = randomize_digits("ID 99-88", all, 4, "d");
  auto b = randomize_digits("ID 99-88", all, 4, "d");
  REQUIRE(a);
  CHECK(*a == *b);
}

TEST_CASE("last-n larger than the digit count selects every digit") {
  PositionSpec last12{12};
  auto out = randomize_digits("x12", last12, 5, "d");
  REQUIRE(out);
  CHECK(out->size() == 3);
  CHECK((*out)[0] == 'x');
}

TEST_CASE("spans without digits cannot be randomized") {
  PositionSpec last4{4};
  CHECK_FALSE(randomize_digits("no digits", last4, 1, "d"));
  CHECK_FALSE(randomize_digits("", last4, 1, "d"));
}

// ---------------------------------------------------------------------------
// zip masking
// ---------------------------------------------------------------------------

TEST_CASE("zip masking generalizes the last three characters") {
  CHECK(mask_zip("02139").value() == "02000");
  CHECK(mask_zip("M5G 2C4").value() == "M5G 0A0");
  CHECK(mask_zip("123 45").value() == "120 00");
  CHECK(mask_zip("99501-4425").value() == "99501-4000");
}

TEST_CASE("zip masking refuses short spans") {
  CHECK_FALSE(mask_zip("AB"));
  CHECK_FALSE(mask_zip("4 2"));
  CHECK_FALSE(mask_zip(""));
}

// ---------------------------------------------------------------------------
// date shifting
// ---------------------------------------------------------------------------

TEST_CASE("each supported date format shifts and renders in place") {
  CHECK(shift_date("01/13/2087", 30).value() == "02/12/2087");
  CHECK(shift_date("7/4/1999", 200).value() == "1/20/2000");
  CHECK(shift_date("2019-02-28", 1).value() == "2019-03-01");
  CHECK(shift_date("02-29-2020", 365).value() == "02-28-2021");
  CHECK(shift_date("Sep 9, 2001", -45).value() == "Jul 26, 2001");
  CHECK(shift_date("September 9, 2001", -45).value() == "July 26, 2001");
  CHECK(shift_date("28 February 1900", 1).value() == "01 March 1900");
  CHECK(shift_date("12/31/29", 1).value() == "01/01/30");
}

TEST_CASE("two-digit years pivot at 30") {
  // 29 -> 2029, 30 -> 1930
  CHECK(shift_date("12/31/29", 1).value() == "01/01/30");
  CHECK(shift_date("01/05/30", 10).value() == "01/15/30");
}

TEST_CASE("rendering preserves the original field widths") {
  CHECK(shift_date("3/04/2021", 0).value() == "3/04/2021");
  CHECK(shift_date("9/25/1999", 10).value() == "10/05/1999");
  CHECK(shift_date("Sep 9, 2001", 0).value() == "Sep 9, 2001");
}

TEST_CASE("month names keep the original case style") {
  CHECK(shift_date("sep 9, 2001", -45).value() == "jul 26, 2001");
  CHECK(shift_date("SEP 9, 2001", -45).value() == "JUL 26, 2001");
  CHECK(shift_date("28 february 1900", 1).value() == "01 march 1900");
}

TEST_CASE("unsupported or invalid dates do not parse") {
  CHECK_FALSE(shift_date("1/2/29", 1));        // ambiguous short year
  CHECK_FALSE(shift_date("02/30/2020", 1));    // no such day
  CHECK_FALSE(shift_date("13/01/2020", 1));    // no such month
  CHECK_FALSE(shift_date("00/10/2020", 1));
  CHECK_FALSE(shift_date("02/29/2019", 1));    // not a leap year
  CHECK_FALSE(shift_date("2020/01/02", 1));
  CHECK_FALSE(shift_date("yesterday", 1));
  CHECK_FALSE(shift_date("2021-3-4", 1));
  CHECK_FALSE(shift_date("Sept 9, 2001", 1));  // not a known month token
  CHECK_FALSE(shift_date("", 1));
}

TEST_CASE("derived shifts are keyed, nonzero and bounded") {
  CHECK(derive_shift_days(42, "d1") == -319);
  CHECK(derive_shift_days(42, "d2") == 114);
  CHECK(derive_shift_days(7, "perf-0") == 164);
  for (int i = 0; i < 2000; ++i) {
    int days = derive_shift_days(13, "doc-" + std::to_string(i));
    CHECK(days != 0);
    CHECK(std::abs(days) <= 364);
  }
  for (int i = 0; i < 200; ++i) {
    int days = derive_shift_days(13, "doc-" + std::to_string(i), 30);
    CHECK(days != 0);
    CHECK(std::abs(days) <= 30);
  }
}

TEST_CASE("one document shares one shift, so intervals survive") {
  using namespace std::chrono;
  auto parse_iso = [](const std::string& s) {
    return sys_days{year{std::stoi(s.substr(0, 4))} /
                    std::stoi(s.substr(5, 2)) / std::stoi(s.substr(8, 2))};
  };
  for (int i = 0; i < 50; ++i) {
    std::string doc = "doc-" + std::to_string(i);
    int days = derive_shift_days(99, doc);
    std::string a = shift_date("2013-05-10", days).value();
    std::string b = shift_date("2013-07-22", days).value();
    CHECK((parse_iso(b) - parse_iso(a)).count() == 73);
  }
}

// ---------------------------------------------------------------------------
// maskers, registry, policy
// ---------------------------------------------------------------------------

TEST_CASE("builtin registry tracks which lists are configured") {
  MaskerConfig bare;
  MaskerRegistry r = MaskerRegistry::builtins(bare, 1);
  for (const char* name :
       {"redact", "keep", "date_shift", "digit_randomize", "zip_mask"})
    CHECK(r.find(name) != nullptr);
  CHECK(r.find("name_surrogate") == nullptr);
  CHECK(r.find("profession_surrogate") == nullptr);

  MaskerConfig full;
  full.first_names = kFirst;
  full.last_names = kLast;
  full.professions = kProf;
  MaskerRegistry r2 = MaskerRegistry::builtins(full, 1);
  CHECK(r2.find("name_surrogate") != nullptr);
  CHECK(r2.find("profession_surrogate") != nullptr);
}

TEST_CASE("registering the same masker twice is an error") {
  MaskerRegistry r;
  r.register_masker("m", std::make_unique<KeepMasker>());
  CHECK_THROWS_AS(r.register_masker("m", std::make_unique<KeepMasker>()),
                  error);
}

TEST_CASE("date shift masker fails closed on unparseable spans") {
  DateShiftMasker m;
  m.initialize({}, 42);
  MaskContext ctx{"d1"};
  MaskResult r = m.apply("sometime in March", EntityClass::DATE, ctx);
  CHECK(r.text == "XXX-DATE");
  CHECK(r.flag == "unparsed-date");
  CHECK(r.text.find("March") == std::string::npos);
}

TEST_CASE("date shift masker applies the document shift") {
  DateShiftMasker m;
  m.initialize({}, 42);
  MaskContext ctx{"d1"};  // derived shift is -319
  MaskResult r = m.apply("2020-06-15", EntityClass::DATE, ctx);
  CHECK(r.text == "2019-08-01");
  CHECK(r.flag.empty());
}

TEST_CASE("date shift masker flags width changes") {
  DateShiftMasker m;
  MaskerConfig cfg;
  cfg.options["max_shift"] = "10";
  m.initialize(cfg, 8);
  bool saw_flag = false;
  for (int i = 0; i < 40 && !saw_flag; ++i) {
    MaskContext ctx{"doc-" + std::to_string(i)};
    MaskResult r = m.apply("9/25/1999", EntityClass::DATE, ctx);
    if (r.flag == "shape-changed") {
      saw_flag = true;
      CHECK(word_shape(r.text) != word_shape("9/25/1999"));
    }
  }
  CHECK(saw_flag);  // within +-10 days some shift crosses into October
}

TEST_CASE("digit randomize masker honours the positions option") {
  DigitRandomizeMasker m;
  MaskerConfig cfg;
  cfg.options["positions"] = "all";
  m.initialize(cfg, 7);
  MaskContext ctx{"docA"};
  CHECK(m.apply("A1B", EntityClass::ID, ctx).text == "A9B");

  MaskResult miss = m.apply("no digits", EntityClass::ID, ctx);
  CHECK(miss.text == "XXX-ID");
  CHECK(miss.flag == "no-digits");

  DigitRandomizeMasker bad;
  MaskerConfig bad_cfg;
  bad_cfg.options["positions"] = "everything";
  CHECK_THROWS_AS(bad.initialize(bad_cfg, 7), error);
}

TEST_CASE("zip masker falls back to redaction when too short") {
  ZipMasker m;
  m.initialize({}, 1);
  MaskContext ctx{"d"};
  CHECK(m.apply("02139", EntityClass::LOCATION, ctx).text == "02000");
  MaskResult r = m.apply("AB", EntityClass::LOCATION, ctx);
  CHECK(r.text == "XXX-LOCATION");
  CHECK(r.flag == "too-short");
}

TEST_CASE("policy defaults every class to redact") {
  MaskPolicy policy;
  for (EntityClass c : all_entity_classes())
    CHECK(policy.action_for(c).kind == MaskAction::Kind::redact);
  policy.set(EntityClass::DATE, MaskAction::mask_action("date_shift"));
  CHECK(policy.action_for(EntityClass::DATE).kind == MaskAction::Kind::mask);
  CHECK(policy.action_for(EntityClass::NAME).kind == MaskAction::Kind::redact);
}

TEST_CASE("policy validation names missing maskers") {
  MaskPolicy policy;
  policy.set(EntityClass::NAME, MaskAction::mask_action("ghost"));
  MaskerRegistry registry = MaskerRegistry::builtins({}, 1);
  CHECK_THROWS_WITH(policy.validate(registry),
                    Catch::Matchers::ContainsSubstring("ghost") &&
                        Catch::Matchers::ContainsSubstring("NAME"));
  policy.set(EntityClass::NAME, MaskAction::mask_action("date_shift"));
  CHECK_NOTHROW(policy.validate(registry));
}

// ---------------------------------------------------------------------------
// apply_policy
// ---------------------------------------------------------------------------

namespace {

Document doc_of(std::string id, std::string text) {
  Document d;
  d.id = std::move(id);
  d.text = std::move(text);
  return d;
}

}  // namespace

TEST_CASE("apply_policy splices replacements into the text") {
  Document doc = doc_of("d", "Call Dr. John Smith at 416-555-2368.");
  std::vector<AnnotatedSpan> preds = {
      span(9, 19, EntityClass::NAME),
      span(23, 35, EntityClass::CONTACT),
  };
  MaskPolicy policy;
  MaskerRegistry registry = MaskerRegistry::builtins({}, 1);
  MaskedDocument out = apply_policy(doc, preds, policy, registry);
  CHECK(out.text == "Call Dr. XXX-NAME at XXX-CONTACT.");
  REQUIRE(out.events.size() == 2);
  CHECK(out.events[0].span.text == "John Smith");
  CHECK(out.events[0].action == "redact");
  CHECK(out.events[0].replacement == "XXX-NAME");
  CHECK(out.events[1].span.text == "416-555-2368");
}

TEST_CASE("splicing is right to left so earlier offsets stay valid") {
  Document doc = doc_of("d", "AA BB CC");
  std::vector<AnnotatedSpan> preds = {
      span(0, 2, EntityClass::NAME),
      span(6, 8, EntityClass::ID),
  };
  MaskPolicy policy;
  policy.set(EntityClass::NAME, MaskAction::redact_action("X"));
  policy.set(EntityClass::ID, MaskAction::redact_action("YYYY"));
  MaskerRegistry registry = MaskerRegistry::builtins({}, 1);
  MaskedDocument out = apply_policy(doc, preds, policy, registry);
  CHECK(out.text == "X BB YYYY");
}

TEST_CASE("offsets are scalar positions even after multibyte text") {
  Document doc = doc_of("d", "José saw Ana.");
  std::vector<AnnotatedSpan> preds = {span(9, 12, EntityClass::NAME)};
  MaskPolicy policy;
  MaskerRegistry registry = MaskerRegistry::builtins({}, 1);
  MaskedDocument out = apply_policy(doc, preds, policy, registry);
  CHECK(out.text == "José saw XXX-NAME.");
  CHECK(out.events[0].span.text == "Ana");
}

TEST_CASE("keep policy reproduces the original text") {
  Document doc = doc_of("d", "Seen by Dr. Lee on 2021-03-04.");
  std::vector<AnnotatedSpan> preds = {
      span(12, 15, EntityClass::NAME),
      span(19, 29, EntityClass::DATE),
  };
  MaskPolicy policy;
  for (EntityClass c : all_entity_classes())
    policy.set(c, MaskAction::keep_action());
  MaskerRegistry registry = MaskerRegistry::builtins({}, 1);
  MaskedDocument out = apply_policy(doc, preds, policy, registry);
  CHECK(out.text == doc.text);
  CHECK(out.events[0].replacement == "Lee");
  CHECK(out.events[0].action == "keep");
}

TEST_CASE("mask actions record the masker and its flag") {
  Document doc = doc_of("d1", "On someday in spring.");
  std::vector<AnnotatedSpan> preds = {span(3, 20, EntityClass::DATE)};
  MaskPolicy policy;
  policy.set(EntityClass::DATE, MaskAction::mask_action("date_shift"));
  MaskerRegistry registry = MaskerRegistry::builtins({}, 42);
  MaskedDocument out = apply_policy(doc, preds, policy, registry);
  CHECK(out.text == "On XXX-DATE.");
  REQUIRE(out.events.size() == 1);
  CHECK(out.events[0].action == "mask");
  CHECK(out.events[0].masker == "date_shift");
  CHECK(out.events[0].flag == "unparsed-date");
}

TEST_CASE("apply_policy rejects overlapping predictions") {
  Document doc = doc_of("dup", "abcdefghij");
  std::vector<AnnotatedSpan> preds = {
      span(0, 5, EntityClass::NAME),
      span(3, 8, EntityClass::ID),
  };
  MaskPolicy policy;
  MaskerRegistry registry = MaskerRegistry::builtins({}, 1);
  CHECK_THROWS_WITH(apply_policy(doc, preds, policy, registry),
                    Catch::Matchers::ContainsSubstring("dup"));
}

TEST_CASE("apply_policy rejects out-of-bounds and empty spans") {
  Document doc = doc_of("d", "short");
  MaskPolicy policy;
  MaskerRegistry registry = MaskerRegistry::builtins({}, 1);
  std::vector<AnnotatedSpan> beyond = {span(2, 9, EntityClass::NAME)};
  CHECK_THROWS_AS(apply_policy(doc, beyond, policy, registry), error);
  std::vector<AnnotatedSpan> empty = {span(3, 3, EntityClass::NAME)};
  CHECK_THROWS_AS(apply_policy(doc, empty, policy, registry), error);
}

TEST_CASE("events come back sorted even when predictions are not") {
  Document doc = doc_of("d", "one two three four");
  std::vector<AnnotatedSpan> preds = {
      span(8, 13, EntityClass::ID),
      span(0, 3, EntityClass::NAME),
  };
  MaskPolicy policy;
  MaskerRegistry registry = MaskerRegistry::builtins({}, 1);
  MaskedDocument out = apply_policy(doc, preds, policy, registry);
  REQUIRE(out.events.size() == 2);
  CHECK(out.events[0].span.start == 0);
  CHECK(out.events[1].span.start == 8);
  CHECK(out.text == "XXX-NAME two XXX-ID four");
}

TEST_CASE("masking a document twice gives identical output") {
  MaskerConfig cfg;
  cfg.first_names = kFirst;
  cfg.last_names = kLast;
  cfg.professions = kProf;
  Document doc = doc_of("stable-doc",
                        "Pt John Smith, a baker, seen 2021-03-04. MRN AB12345. "
                        "Zip 02139.");
  std::vector<AnnotatedSpan> preds = {
      span(3, 13, EntityClass::NAME),
      span(17, 22, EntityClass::PROFESSION),
      span(29, 39, EntityClass::DATE),
      span(45, 52, EntityClass::ID),
      span(58, 63, EntityClass::LOCATION),
  };
  MaskPolicy policy;
  policy.set(EntityClass::NAME, MaskAction::mask_action("name_surrogate"));
  policy.set(EntityClass::PROFESSION,
             MaskAction::mask_action("profession_surrogate"));
  policy.set(EntityClass::DATE, MaskAction::mask_action("date_shift"));
  policy.set(EntityClass::ID, MaskAction::mask_action("digit_randomize"));
  policy.set(EntityClass::LOCATION, MaskAction::mask_action("zip_mask"));

  MaskerRegistry registry = MaskerRegistry::builtins(cfg, 2024);
  MaskedDocument a = apply_policy(doc, preds, policy, registry);
  MaskerRegistry registry2 = MaskerRegistry::builtins(cfg, 2024);
  MaskedDocument b = apply_policy(doc, preds, policy, registry2);
  CHECK(a.text == b.text);
  REQUIRE(a.events.size() == b.events.size());
  for (size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].replacement == b.events[i].replacement);
    CHECK(a.events[i].flag == b.events[i].flag);
  }
  // none of the original surfaces survive into the masked text
  for (const char* secret : {"John", "Smith", "baker", "2021-03-04", "AB12345",
                             "02139"})
    CHECK(a.text.find(secret) == std::string::npos);

  MaskerRegistry other_seed = MaskerRegistry::builtins(cfg, 2025);
  MaskedDocument c = apply_policy(doc, preds, policy, other_seed);
  CHECK(c.text != a.text);
}
