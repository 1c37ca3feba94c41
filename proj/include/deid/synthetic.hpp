// synthetic.hpp -- deterministic generator for the bundled evaluation
// corpus. No real patient data anywhere: every narrative is assembled
// from fixed word pools with a keyed RNG, so the same seed always yields
// byte-identical documents.
//
// The pools are split into "common" entries (seen often, so they appear
// in both corpus splits) and "rare" entries (seen once or twice, so a
// held-out document often contains surface forms absent from training).
// All names and places, common and rare, are covered by the bundled
// gazetteers, while drug names are not; sentences that put a surname or
// a drug in the same slot are what give dictionary features leverage.

#ifndef DEID_SYNTHETIC_HPP
#define DEID_SYNTHETIC_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "deid/core.hpp"
#include "deid/rng.hpp"
#include "deid/tokenize.hpp"
#include "deid/unicode.hpp"

namespace deid::synthetic {

inline const std::vector<std::string>& common_first_names() {
  static const std::vector<std::string> v = {
      "James", "Mary", "Robert", "Patricia", "John", "Jennifer", "Michael",
      "Linda", "David", "Elizabeth", "William", "Barbara", "Richard", "Susan",
      "Joseph", "Jessica", "Thomas", "Sarah", "Charles", "Karen", "Christopher",
      "Nancy", "Daniel", "Lisa", "Matthew", "Betty", "Anthony", "Margaret",
      "Mark", "Sandra"};
  return v;
}

inline const std::vector<std::string>& rare_first_names() {
  static const std::vector<std::string> v = {
      "Abner", "Adela", "Alaric", "Albertine", "Aldous", "Alfreda", "Ambrose",
      "Anatole", "Anselm", "Arabella", "Archibald", "Arlene", "Augustin",
      "Aurelia", "Balthazar", "Barnaby", "Bartholomew", "Beatrix", "Benedicta",
      "Bertram", "Blanche", "Boniface", "Briony", "Caspian", "Cecily",
      "Celestine", "Clement", "Cordelia", "Cornelius", "Crispin", "Cuthbert",
      "Delphine", "Desmond", "Dorothea", "Edmund", "Eleanora", "Elias",
      "Eloise", "Emmeline", "Ephraim", "Ernestine", "Esmond", "Eugenia",
      "Evander", "Fabian", "Felicity", "Ferdinand", "Fionnuala", "Florentine",
      "Gideon", "Giselle", "Godfrey", "Griselda", "Gustave", "Hadley",
      "Hamish", "Harriet", "Hezekiah", "Hortense", "Ignatius", "Imogen",
      "Inigo", "Isadora", "Jasper", "Jemima", "Jerome", "Josephine", "Keziah",
      "Lavinia", "Leander", "Leopold", "Lucinda", "Ludovic", "Magdalena",
      "Malachi", "Marguerite", "Maximilian", "Melisande", "Montgomery",
      "Mortimer", "Nathaniel", "Octavia", "Olympia", "Osmond", "Oswald",
      "Ottoline", "Percival", "Perpetua", "Phineas", "Prudence", "Quentin",
      "Quinlan", "Raphael", "Reginald", "Rosalind", "Rowena", "Rupert",
      "Seraphina", "Sigmund", "Sylvester", "Tabitha", "Thaddeus", "Theodora",
      "Tobias", "Ulysses", "Ursula", "Valentina", "Venetia", "Vincenzo",
      "Virgil", "Wallace", "Wilhelmina", "Winifred", "Xavier", "Yolanda",
      "Zachariah", "Zenobia", "Alonzo", "Bathsheba", "Casimir"};
  return v;
}

inline const std::vector<std::string>& common_last_names() {
  static const std::vector<std::string> v = {
      "Smith", "Johnson", "Williams", "Brown", "Jones", "Garcia", "Miller",
      "Davis", "Rodriguez", "Martinez", "Hernandez", "Lopez", "Gonzalez",
      "Wilson", "Anderson", "Thomas", "Taylor", "Moore", "Jackson", "Martin",
      "Lee", "Perez", "Thompson", "White", "Harris", "Sanchez", "Clark",
      "Ramirez", "Lewis", "Robinson"};
  return v;
}

inline const std::vector<std::string>& rare_last_names() {
  static const std::vector<std::string> v = {
      "Abernathy", "Ackerman", "Ainsworth", "Alcott", "Aldridge", "Appleton",
      "Ashcroft", "Atwater", "Babcock", "Bainbridge", "Barlowe", "Bartleby",
      "Beckett", "Bellamy", "Birchall", "Blackwood", "Bowditch", "Braddock",
      "Bramwell", "Brockway", "Burgess", "Cadwell", "Carmichael", "Chadwick",
      "Cheswick", "Claypool", "Colfax", "Cranston", "Crowther", "Culpepper",
      "Dalrymple", "Darlington", "Delacroix", "Dinsmore", "Dunmore",
      "Eastwood", "Ellington", "Emsworth", "Fairbanks", "Farnsworth",
      "Fitzwilliam", "Follett", "Galbraith", "Garfield", "Gillingham",
      "Granger", "Greenleaf", "Grimshaw", "Haverford", "Hawthorne",
      "Heatherton", "Hollingsworth", "Holloway", "Hornblower", "Huxley",
      "Ingleby", "Ironside", "Jardine", "Kensington", "Kingsley", "Lachance",
      "Langford", "Larkspur", "Leadbetter", "Lockhart", "Longfellow",
      "Lovelace", "Mabry", "Marchbanks", "Merriweather", "Middlebrook",
      "Montclair", "Mortlake", "Nettleton", "Northcott", "Oakhurst",
      "Ogilvie", "Oliphant", "Outerbridge", "Pemberton", "Pennington",
      "Pickering", "Prendergast", "Quimby", "Rathbone", "Ravenscroft",
      "Redgrave", "Rockwell", "Rutherford", "Sainsbury", "Sandringham",
      "Shelburne", "Silverton", "Sinclair", "Somerfield", "Stanhope",
      "Stillwater", "Strickland", "Sutherland", "Swinburne", "Talmadge",
      "Tennyson", "Thackeray", "Thistlewood", "Tillinghast", "Trevelyan",
      "Underhill", "Vanderberg", "Vickery", "Wadsworth", "Wainwright",
      "Walmsley", "Westbrook", "Whitfield", "Wickham", "Winslow",
      "Wolcott", "Woodhouse", "Wycliffe", "Yardley"};
  return v;
}

inline const std::vector<std::string>& common_cities() {
  static const std::vector<std::string> v = {
      "Toronto", "Boston", "Chicago", "Denver", "Seattle", "Portland",
      "Austin", "Dallas", "Houston", "Phoenix", "Atlanta", "Miami", "Orlando",
      "Nashville", "Memphis", "Detroit", "Cleveland", "Pittsburgh",
      "Baltimore", "Richmond", "Charlotte", "Raleigh", "Tampa", "Tucson",
      "Omaha"};
  return v;
}

inline const std::vector<std::string>& rare_cities() {
  static const std::vector<std::string> v = {
      "Abilene", "Akron", "Albany", "Amarillo", "Anchorage", "Annapolis",
      "Asheville", "Aspen", "Augusta", "Bakersfield", "Bangor", "Beaumont",
      "Bellevue", "Berkeley", "Bethesda", "Billings", "Biloxi", "Binghamton",
      "Bismarck", "Boise", "Boulder", "Bozeman", "Bridgeport", "Buffalo",
      "Burlington", "Butte", "Camden", "Carlsbad", "Casper", "Chattanooga",
      "Cheyenne", "Concord", "Corvallis", "Danbury", "Davenport", "Dayton",
      "Decatur", "Duluth", "Durango", "Durham", "Elgin", "Elmira", "Erie",
      "Eugene", "Evanston", "Everett", "Fargo", "Flagstaff", "Frankfort",
      "Fresno", "Gainesville", "Galveston", "Greeley", "Hartford", "Helena",
      "Hoboken", "Juneau", "Kalamazoo", "Kenosha", "Knoxville", "Lafayette",
      "Laramie", "Laredo", "Lexington", "Lubbock", "Macon", "Madison",
      "Mankato", "Marquette", "Missoula", "Modesto", "Monterey", "Montpelier",
      "Muncie", "Nashua", "Newark", "Ogden", "Olympia", "Oxnard", "Pasadena",
      "Peoria", "Pocatello", "Provo", "Pueblo", "Racine", "Redding", "Reno",
      "Roanoke", "Salem", "Santee", "Savannah", "Scranton", "Sedona",
      "Spokane", "Stamford", "Syracuse", "Tacoma", "Topeka", "Trenton",
      "Tulsa", "Waco", "Wichita", "Yonkers"};
  return v;
}

inline const std::vector<std::string>& countries() {
  static const std::vector<std::string> v = {
      "Canada", "France", "Germany", "Spain", "Italy", "Portugal", "Ireland",
      "Scotland", "Norway", "Sweden", "Denmark", "Finland", "Poland",
      "Austria", "Belgium", "Netherlands", "Switzerland", "Greece", "Turkey",
      "Egypt", "Morocco", "Kenya", "Nigeria", "Ghana", "India", "Nepal",
      "Thailand", "Vietnam", "Japan", "Korea", "China", "Mongolia",
      "Australia", "Chile", "Peru", "Brazil", "Argentina", "Mexico",
      "Colombia", "Ecuador"};
  return v;
}

inline const std::vector<std::string>& professions() {
  static const std::vector<std::string> v = {
      "accountant", "architect", "baker", "carpenter", "cashier", "chef",
      "clerk", "dentist", "electrician", "engineer", "farmer", "firefighter",
      "florist", "gardener", "hairdresser", "janitor", "journalist", "lawyer",
      "librarian", "locksmith", "mechanic", "musician", "nurse", "optician",
      "painter", "pharmacist", "photographer", "pilot", "plumber", "professor",
      "receptionist", "tailor", "teacher", "technician", "translator",
      "veterinarian", "waiter", "welder"};
  return v;
}

// Capitalized distractors deliberately absent from every gazetteer.
inline const std::vector<std::string>& drugs() {
  static const std::vector<std::string> v = {
      "Metformin", "Lisinopril", "Atorvastatin", "Amlodipine", "Omeprazole",
      "Simvastatin", "Losartan", "Gabapentin", "Hydrochlorothiazide",
      "Sertraline", "Montelukast", "Pantoprazole", "Furosemide", "Prednisone",
      "Tramadol", "Duloxetine", "Rosuvastatin", "Tamsulosin", "Carvedilol",
      "Meloxicam", "Clopidogrel", "Citalopram", "Warfarin", "Venlafaxine",
      "Allopurinol", "Cyclobenzaprine", "Methotrexate", "Levetiracetam",
      "Quetiapine", "Spironolactone", "Buspirone", "Donepezil", "Finasteride",
      "Mirtazapine", "Oxybutynin", "Propranolol", "Ranitidine", "Topiramate",
      "Valsartan", "Zolpidem"};
  return v;
}

inline const std::vector<std::string>& facility_words() {
  static const std::vector<std::string> v = {
      "Lakeview", "Summit", "Riverbend", "Oakridge", "Pinehurst", "Maplewood",
      "Cedarcrest", "Stonebridge", "Brookside", "Hillcrest", "Fairview",
      "Meadowland", "Westgate", "Eastmoor", "Northfield", "Southgate",
      "Clearwater", "Silverlake", "Greenfield", "Ironwood"};
  return v;
}

namespace detail {

// Appends space-separated words to a document while tracking scalar
// offsets; entity() additionally records a gold span over its surface.
class DocBuilder {
public:
  void word(std::string_view w) {
    if (!text_.empty()) text_ += U' ';
    text_ += uni::decode_utf8(w);
  }

  void entity(std::string_view surface, EntityClass cls) {
    if (!text_.empty()) text_ += U' ';
    AnnotatedSpan s;
    s.start = text_.size();
    text_ += uni::decode_utf8(surface);
    s.end = text_.size();
    s.entity_class = cls;
    s.text = std::string(surface);
    spans_.push_back(std::move(s));
  }

  Document finish(std::string id) {
    Document doc;
    doc.id = std::move(id);
    doc.text = uni::encode_utf8(text_);
    doc.gold = std::move(spans_);
    doc.tokens = tokenize_sentences(text_);
    return doc;
  }

private:
  std::u32string text_;
  std::vector<AnnotatedSpan> spans_;
};

inline const std::string& pick(KeyedRng& rng, const std::vector<std::string>& pool) {
  return pool[rng.below(static_cast<uint32_t>(pool.size()))];
}

// 1 in 4 draws comes from the rare pool.
inline const std::string& pick_skewed(KeyedRng& rng,
                                      const std::vector<std::string>& common,
                                      const std::vector<std::string>& rare) {
  return rng.below(4) == 0 ? pick(rng, rare) : pick(rng, common);
}

inline std::string two_digits(uint32_t v) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02u", v);
  return buf;
}

inline std::string make_date(KeyedRng& rng) {
  static const char* mon[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                              "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  static const char* month[] = {"January", "February", "March",     "April",
                                "May",     "June",     "July",      "August",
                                "September", "October", "November", "December"};
  uint32_t y = 1990 + rng.below(35);
  uint32_t m = 1 + rng.below(12);
  uint32_t d = 1 + rng.below(28);
  switch (rng.below(8)) {
    case 0: return two_digits(m) + "/" + two_digits(d) + "/" + std::to_string(y);
    case 1: return std::to_string(m) + "/" + std::to_string(d) + "/" + std::to_string(y);
    case 2: return std::to_string(y) + "-" + two_digits(m) + "-" + two_digits(d);
    case 3: return two_digits(m) + "-" + two_digits(d) + "-" + std::to_string(y);
    case 4: return std::string(mon[m - 1]) + " " + std::to_string(d) + ", " + std::to_string(y);
    case 5: return std::string(month[m - 1]) + " " + std::to_string(d) + ", " + std::to_string(y);
    case 6: return std::to_string(d) + " " + month[m - 1] + " " + std::to_string(y);
    default: return two_digits(m) + "/" + two_digits(d) + "/" + two_digits(y % 100);
  }
}

inline std::string make_phone(KeyedRng& rng) {
  auto digits = [&](int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += char('0' + rng.below(10));
    return s;
  };
  std::string area = std::to_string(2 + rng.below(8)) + digits(2);
  if (rng.below(2) == 0)
    return area + "-" + digits(3) + "-" + digits(4);
  return "(" + area + ") " + digits(3) + "-" + digits(4);
}

inline std::string make_mrn(KeyedRng& rng) {
  std::string s;
  for (int i = 0; i < 2; ++i) s += char('A' + rng.below(26));
  for (int i = 0; i < 6; ++i) s += char('0' + rng.below(10));
  return s;
}

inline std::string make_facility(KeyedRng& rng) {
  static const char* kinds[] = {"Medical Center", "General Hospital",
                                "Community Clinic"};
  return pick(rng, facility_words()) + " " + kinds[rng.below(3)];
}

}  // namespace detail

// One narrative with `extra_sentences` sentences after the fixed opening
// three. The opening guarantees NAME, AGE, PROFESSION, LOCATION and DATE
// in every document; CONTACT, ID and PHI rotate with the index.
inline Document make_document(uint64_t seed, size_t index, int extra_sentences) {
  using namespace detail;
  char key[32];
  std::snprintf(key, sizeof(key), "doc-%zu", index);
  KeyedRng rng(seed, key, "synthetic", "corpus");
  DocBuilder b;

  const std::string first =
      pick_skewed(rng, common_first_names(), rare_first_names());
  const std::string last =
      pick_skewed(rng, common_last_names(), rare_last_names());
  const std::string city = pick_skewed(rng, common_cities(), rare_cities());

  b.word("Patient :");
  b.entity(first + " " + last, EntityClass::NAME);
  b.word(", a");
  b.entity(std::to_string(18 + rng.below(82)), EntityClass::AGE);
  b.word("year old");
  b.entity(pick(rng, professions()), EntityClass::PROFESSION);
  b.word("from");
  b.entity(city, EntityClass::LOCATION);
  b.word(",");
  b.entity(pick(rng, countries()), EntityClass::LOCATION);
  b.word(".");

  b.word("Seen in clinic by Doctor");
  b.entity(pick_skewed(rng, common_last_names(), rare_last_names()),
           EntityClass::NAME);
  b.word("on");
  b.entity(make_date(rng), EntityClass::DATE);
  b.word(".");

  switch (index % 3) {
    case 0:
      b.word("Contact number");
      b.entity(make_phone(rng), EntityClass::CONTACT);
      b.word("listed .");
      break;
    case 1:
      b.word("Record number");
      b.entity(make_mrn(rng), EntityClass::ID);
      b.word("assigned .");
      break;
    default:
      b.word("Admitted to");
      b.entity(make_facility(rng), EntityClass::PHI);
      b.word("on");
      b.entity(make_date(rng), EntityClass::DATE);
      b.word(".");
      break;
  }

  for (int s = 0; s < extra_sentences; ++s) {
    switch (rng.below(10)) {
      case 0:
        b.word("Contact number");
        b.entity(make_phone(rng), EntityClass::CONTACT);
        b.word("listed .");
        break;
      case 1:
        b.word("Record number");
        b.entity(make_mrn(rng), EntityClass::ID);
        b.word("assigned .");
        break;
      case 2:
        b.word("Admitted to");
        b.entity(make_facility(rng), EntityClass::PHI);
        b.word("on");
        b.entity(make_date(rng), EntityClass::DATE);
        b.word(".");
        break;
      case 3:
        b.word("Follow up scheduled for");
        b.entity(make_date(rng), EntityClass::DATE);
        b.word("at the clinic .");
        break;
      case 4:  // surname or drug in the same slot
        b.word("Summary mentions");
        if (rng.below(2) == 0)
          b.entity(pick_skewed(rng, common_last_names(), rare_last_names()),
                   EntityClass::NAME);
        else
          b.word(pick(rng, drugs()));
        b.word("again .");
        break;
      case 5:  // city or drug in the same slot
        b.word("Transfer from");
        if (rng.below(2) == 0)
          b.entity(pick_skewed(rng, common_cities(), rare_cities()),
                   EntityClass::LOCATION);
        else
          b.word(pick(rng, drugs()));
        b.word("arranged .");
        break;
      case 6:
        b.word("Started on");
        b.word(pick(rng, drugs()));
        b.word(std::to_string(10 + 10 * rng.below(74)));
        b.word("mg daily .");
        break;
      case 7:
        b.word("Works as a");
        b.entity(pick(rng, professions()), EntityClass::PROFESSION);
        b.word("near");
        b.entity(pick_skewed(rng, common_cities(), rare_cities()),
                 EntityClass::LOCATION);
        b.word(".");
        break;
      case 8:
        b.word("Blood pressure stable and patient resting comfortably .");
        break;
      default:
        b.word("Plan reviewed with the care team this morning .");
        break;
    }
  }

  char id[32];
  std::snprintf(id, sizeof(id), "syn-%06zu", index + 1);
  return b.finish(id);
}

struct CorpusConfig {
  uint64_t seed = 2024;
  size_t documents = 320;
  int min_extra_sentences = 4;
  int max_extra_sentences = 10;
};

inline std::vector<Document> make_corpus(const CorpusConfig& cfg) {
  std::vector<Document> docs;
  docs.reserve(cfg.documents);
  for (size_t i = 0; i < cfg.documents; ++i) {
    KeyedRng rng(cfg.seed, "sizes", "synthetic",
                 std::to_string(i));
    int span = cfg.max_extra_sentences - cfg.min_extra_sentences + 1;
    int extra = cfg.min_extra_sentences +
                static_cast<int>(rng.below(static_cast<uint32_t>(span)));
    docs.push_back(make_document(cfg.seed, i, extra));
  }
  return docs;
}

// ~500-token narratives for throughput measurement.
inline std::vector<Document> make_long_narratives(uint64_t seed, size_t count,
                                                  int extra_sentences = 55) {
  std::vector<Document> docs;
  docs.reserve(count);
  for (size_t i = 0; i < count; ++i)
    docs.push_back(make_document(seed, 1000000 + i, extra_sentences));
  return docs;
}

// Gazetteer contents: common + rare pools, sorted for stable bytes.
inline std::vector<std::string> gazetteer_entries(const std::string& which) {
  std::vector<std::string> out;
  auto append = [&](const std::vector<std::string>& v) {
    out.insert(out.end(), v.begin(), v.end());
  };
  if (which == "first_names") {
    append(common_first_names());
    append(rare_first_names());
  } else if (which == "last_names") {
    append(common_last_names());
    append(rare_last_names());
  } else if (which == "cities") {
    append(common_cities());
    append(rare_cities());
  } else if (which == "countries") {
    append(countries());
  } else {
    throw error("unknown gazetteer '" + which + "'");
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace deid::synthetic

#endif  // DEID_SYNTHETIC_HPP
