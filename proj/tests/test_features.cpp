#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "deid/features.hpp"
#include "deid/tokenize.hpp"

using namespace deid;

namespace {

std::set<std::string> as_set(const FeatureVector& v) {
  return {v.active.begin(), v.active.end()};
}

std::vector<Token> sentence(const std::string& text) {
  return tokenize(uni::decode_utf8(text));
}

}  // namespace

TEST_CASE("word shape maps W w d and keeps specials") {
  CHECK(word_shape("McDonald") == "WwWwwwww");
  CHECK(word_shape("2019-03") == "dddd-dd");
  CHECK(word_shape("A1-b") == "Wd-w");
  CHECK(word_shape("") == "");
}

TEST_CASE("word shape output restricted to W w d at letter and digit positions") {
  for (std::string s : {"Hello", "x9Y-", "...", "ÉCOLE", "ab c"}) {
    std::string shape = word_shape(s);
    std::u32string in = uni::decode_utf8(s);
    std::u32string out = uni::decode_utf8(shape);
    REQUIRE(out.size() == in.size());
    for (size_t i = 0; i < in.size(); ++i) {
      if (uni::is_letter(in[i]) || uni::is_digit(in[i]))
        CHECK((out[i] == U'W' || out[i] == U'w' || out[i] == U'd'));
      else
        CHECK(out[i] == in[i]);
    }
  }
}

TEST_CASE("lexical features for an all-caps token") {
  FeatureVector v;
  lexical_features("JOHN", 0, v);
  v.finish();
  CHECK(as_set(v) == std::set<std::string>{"w[0]=john", "upper[0]", "initcap[0]",
                                           "alnum[0]", "alpha[0]",
                                           "shape[0]=WWWW"});
}

TEST_CASE("lexical features for a lowercase token at offset -1") {
  FeatureVector v;
  lexical_features("ab", -1, v);
  v.finish();
  CHECK(as_set(v) == std::set<std::string>{"w[-1]=ab", "lower[-1]", "alnum[-1]",
                                           "alpha[-1]", "shape[-1]=ww"});
}

TEST_CASE("a special character fires no flags") {
  FeatureVector v;
  lexical_features("-", 2, v);
  v.finish();
  CHECK(as_set(v) == std::set<std::string>{"w[+2]=-", "shape[+2]=-"});
}

TEST_CASE("gazetteer features name the matching dictionaries only") {
  std::vector<Gazetteer> gaz;
  gaz.push_back(load_gazetteer_from_string("city", "Paris\n"));
  gaz.push_back(load_gazetteer_from_string("country", "France\n"));

  FeatureVector v;
  gazetteer_features("paris", 0, gaz, v);
  v.finish();
  CHECK(as_set(v) == std::set<std::string>{"dict:city[0]"});

  FeatureVector w;
  gazetteer_features("paris", 3, gaz, w);
  w.finish();
  CHECK(as_set(w) == std::set<std::string>{"dict:city[+3]"});

  FeatureVector z;
  gazetteer_features("zzz", 0, gaz, z);
  z.finish();
  CHECK(z.active.empty());
}

TEST_CASE("single-token sentence gets full BOS and EOS markers") {
  auto vectors = extract_sequence(sentence("Hello"));
  REQUIRE(vectors.size() == 1);
  auto s = as_set(vectors[0]);
  for (std::string m : {"BOS[-1]", "BOS[-2]", "BOS[-3]", "BOS[-4]", "EOS[+1]",
                        "EOS[+2]", "EOS[+3]", "EOS[+4]"})
    CHECK(s.count(m) == 1);
  CHECK(s.count("w[0]=hello") == 1);
  CHECK(s.count("BOS[0]") == 0);
}

TEST_CASE("window touches at most four tokens on each side") {
  std::vector<Token> toks = sentence("a b c d e f g h i j k l m n o p q r s t");
  REQUIRE(toks.size() == 20);
  auto vectors = extract_sequence(toks);
  auto s = as_set(vectors[5]);
  CHECK(s.count("w[-4]=b") == 1);
  CHECK(s.count("w[+4]=j") == 1);
  // tokens outside the window never appear under any offset
  for (const std::string& f : vectors[5].active) {
    CHECK(f.find("=a") == std::string::npos);
    CHECK(f.find("=k") == std::string::npos);
  }
}

TEST_CASE("gazetteers add exactly the dict features") {
  std::vector<Gazetteer> gaz;
  gaz.push_back(load_gazetteer_from_string("first_name", "Maria\n"));
  std::vector<Token> toks = sentence("Maria arrived today");

  auto plain = extract_sequence(toks, false, gaz);
  auto with = extract_sequence(toks, true, gaz);
  REQUIRE(plain.size() == with.size());
  for (size_t i = 0; i < plain.size(); ++i) {
    std::set<std::string> a = as_set(plain[i]);
    std::set<std::string> b = as_set(with[i]);
    std::set<std::string> diff;
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(),
                        std::inserter(diff, diff.begin()));
    for (const std::string& f : diff) CHECK(f.rfind("dict:", 0) == 0);
    std::set<std::string> missing;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(missing, missing.begin()));
    CHECK(missing.empty());
  }
  CHECK(as_set(with[0]).count("dict:first_name[0]") == 1);
  CHECK(as_set(with[1]).count("dict:first_name[-1]") == 1);
}

TEST_CASE("feature vector i ignores token i+5") {
  std::vector<Token> a = sentence("one two three four five six seven");
  std::vector<Token> b = a;
  b[5].text = "CHANGED";
  auto va = extract_sequence(a);
  auto vb = extract_sequence(b);
  CHECK(va[0] == vb[0]);  // position 0 window ends at +4
  CHECK(va[1] != vb[1]);  // position 1 sees +4 = index 5
}

TEST_CASE("feature index freezes and drops unknown features") {
  FeatureVector v1;
  v1.add("a");
  v1.add("b");
  v1.finish();
  FeatureVector v2;
  v2.add("b");
  v2.add("c");
  v2.finish();

  FeatureIndex idx = index_features({{v1, v2}});
  CHECK(idx.size() == 3);
  CHECK(idx.frozen());

  FeatureVector unseen;
  unseen.add("b");
  unseen.add("zzz");
  unseen.finish();
  auto ids = vectorize(unseen, idx);
  REQUIRE(ids.size() == 1);
  CHECK(idx.name(ids[0]) == "b");
}

TEST_CASE("identical vectors vectorize identically") {
  FeatureVector v;
  v.add("f1");
  v.add("f2");
  v.finish();
  FeatureIndex idx = index_features({{v}});
  CHECK(vectorize(v, idx) == vectorize(v, idx));
  CHECK(vectorize(FeatureVector{}, idx).empty());
}

TEST_CASE("vectorize before freeze is a usage error") {
  FeatureIndex idx;
  idx.add("x");
  FeatureVector v;
  v.add("x");
  v.finish();
  CHECK_THROWS_AS(vectorize(v, idx), error);
}

TEST_CASE("adding to a frozen index throws") {
  FeatureIndex idx;
  idx.freeze();
  CHECK_THROWS_AS(idx.add("x"), error);
}
