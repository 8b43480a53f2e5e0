#include "synthetic_llm.hpp"

#include <array>
#include <cctype>
#include <vector>

#include "ssbench/util.hpp"

namespace ssbench::testing {

namespace {

std::uint64_t fnv(std::string_view s, std::string_view salt = "") {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : salt) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
  for (char c : s) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
  return h;
}

template <typename T, std::size_t N>
const T& pick(const std::array<T, N>& a, std::string_view key, std::string_view salt) {
  return a[fnv(key, salt) % N];
}

// Text between the last `open` and the next `close`.
std::string last_between(const std::string& text, std::string_view open, std::string_view close) {
  auto b = text.rfind(open);
  if (b == std::string::npos) return "";
  b += open.size();
  auto e = text.find(close, b);
  return trim(text.substr(b, e == std::string::npos ? std::string::npos : e - b));
}

struct Theme {
  const char* name;
  const char* explanation;
};

const std::array<Theme, 24> kThemes = {{
    {"Weather and Seasons", "Helps children prepare for rain, snow, heat and the changing seasons."},
    {"Animals and Pets", "Shows gentle ways to meet, feed and care for animals."},
    {"Money and Shopping", "Introduces coins, prices and paying at a counter."},
    {"Sports and Teams", "Explains practices, games and being part of a team."},
    {"Screens and Technology", "Guides children through tablets, timers and shared devices."},
    {"Personal Space", "Describes comfortable distances and respectful touch."},
    {"Nature Walks", "Prepares children for trails, bugs, mud and open spaces."},
    {"Cooking Together", "Walks through kitchen steps, tools and sharing food."},
    {"Music and Sound", "Explores instruments, singing and noisy places."},
    {"Travel Adventures", "Describes packing, waiting and sleeping in new places."},
    {"Night Time", "Explains darkness, quiet hours and bedtime sounds."},
    {"Art Projects", "Supports messy materials, shared supplies and finished work."},
    {"Rules at Home", "Clarifies household expectations in a calm and positive way."},
    {"Public Transport", "Describes buses, subways, tickets and crowded seats."},
    {"Garden Work", "Introduces soil, seeds, watering and waiting for plants to grow."},
    {"Telling Time", "Connects clocks and schedules to the order of the day."},
    {"Body Awareness", "Helps children notice hunger, tiredness and other body signals."},
    {"Water Play", "Prepares children for splashing, swimming and wet clothes."},
    {"Religious Services", "Describes quiet gatherings, songs and waiting during services."},
    {"Sharing Spaces", "Shows how bedrooms, desks and playrooms can be shared."},
    {"Online Friends", "Explains kind messages and safe video calls."},
    {"Volunteering", "Introduces helping at food banks, shelters and clean-up days."},
    {"Camp and Sleepovers", "Prepares children for nights away from home."},
    {"Clothes and Dressing", "Describes buttons, zippers, shoes and outfits for each season."},
}};

struct Verb {
  const char* gerund;
  const char* base;
};

const std::array<Verb, 24> kVerbs = {{
    {"Visiting", "Visit"},     {"Sharing", "Share"},       {"Cleaning", "Clean"},       {"Choosing", "Choose"},
    {"Packing", "Pack"},       {"Watching", "Watch"},      {"Preparing", "Prepare"},    {"Planning", "Plan"},
    {"Finding", "Find"},       {"Trying", "Try"},          {"Carrying", "Carry"},       {"Counting", "Count"},
    {"Drawing", "Draw"},       {"Sorting", "Sort"},        {"Building", "Build"},       {"Washing", "Wash"},
    {"Feeding", "Feed"},       {"Checking", "Check"},      {"Organizing", "Organize"},  {"Decorating", "Decorate"},
    {"Collecting", "Collect"}, {"Exploring", "Explore"},   {"Measuring", "Measure"},    {"Practicing", "Practice"},
}};

const std::array<const char*, 32> kObjects = {
    "Umbrella",      "Rain Boots",   "Fish Tank",     "Piggy Bank",    "Soccer Cleats", "Tablet Timer",
    "Picnic Basket", "Recipe Cards", "Drum Set",      "Suitcase",      "Night Light",   "Paint Brushes",
    "Chore Chart",   "Bus Pass",     "Flower Pots",   "Wall Clock",    "Lunch Box",     "Swim Goggles",
    "Song Book",     "Bunk Beds",    "Video Call",    "Donation Box",  "Sleeping Bag",  "Winter Coat",
    "Bird Feeder",   "Library Books", "Science Kit",  "Puzzle Pieces", "Garden Hose",   "Photo Album",
    "Coin Jar",      "Backpack Tags",
};

const std::array<const char*, 6> kHelpers = {"Dad", "Grandpa", "My coach", "Ms. Rivera", "My sister", "Mr. Patel"};

std::string lower_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string explain(const std::string& prompt) {
  std::string chapter = last_between(prompt, "['Chapter': ", ", 'Social Story Titles");
  return "Helps children understand " + lowercase(chapter) + " through clear and familiar steps.";
}

std::string expand(const std::string& prompt) {
  std::uint64_t h = fnv(prompt);
  std::string out;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& t = kThemes[(h + i * 7) % kThemes.size()];
    if (i > 0) out += "\n" + std::to_string(9 + i) + ". ";
    out += std::string("*") + t.name + "*: " + t.explanation;
  }
  if (h % 4 == 0) out += "\n12. *A chapter without an explanation*";
  return out;
}

std::string titles(const std::string& prompt) {
  std::uint64_t h = fnv(prompt);
  std::string out;
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& v = kVerbs[(h / 7 + i * 5) % kVerbs.size()];
    std::string o = kObjects[(h / 11 + i * 3) % kObjects.size()];
    std::string t = (i % 3 == 2 ? std::string("How to ") + v.base : std::string(v.gerund)) + " the " + o;
    if (i > 0) out += "\n" + std::to_string(i + 1) + ". ";
    out += t;
  }
  return out;
}

std::string activity_of(const std::string& title) {
  if (title.rfind("How to ", 0) == 0) return "learning how to " + lowercase(title.substr(7));
  return lowercase(title);
}

std::string story(const std::string& prompt) {
  std::string title = last_between(prompt, "1. # Title #:\n", "\n");
  std::string act = activity_of(title);
  std::string Act = act;
  Act[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(Act[0])));
  std::string helper = pick(kHelpers, title + prompt, "helper");
  std::uint64_t flavor = fnv(prompt, "flavor") % 10;

  std::string intro = "This story is about " + act + ". " + Act + " happens at home, at school or in town. " +
                      helper + " often helps with " + act + ".";
  std::string body = "When I am " + act + ", there are things to see and hear. " + helper + " explains each part of " +
                     act + " before it starts. Many children spend time " + act + " too. " +
                     "I will try to follow the steps one at a time. " +
                     "The steps stay the same each time, so they become easier to remember. " + helper +
                     " waits nearby and answers questions about " + act + ".";
  std::string concl = Act + " is one more thing I know about. " + helper + " is glad to share " + act + " with me.";
  if (flavor == 0) body += " Everyone must finish quickly.";
  if (flavor == 1) body += " Then a helper asks if You want to stop.";
  return "# Introduction #:\n" + intro + "\n3. # Main Body #:\n" + body + "\n4. # Conclusion #:\n" + concl;
}

std::string judge(const std::string& prompt) {
  int score = 1 + static_cast<int>(fnv(prompt) % 5);
  std::string label = last_between(prompt, "Please rate the ", " (1-5)");
  switch (fnv(prompt, "fmt") % 4) {
    case 0:
      return "Score: " + std::to_string(score) + "\nThe " + lower_first(label) + " is consistent with the title.";
    case 1:
      return std::to_string(score) + "/5\nClear parts and a steady tone.";
    case 2:
      return "**" + label + ": " + std::to_string(score) + "**\nMostly descriptive sentences.";
    default:
      return "Rating - " + std::to_string(score) + " out of 5\nThe story stays on topic.";
  }
}

}  // namespace

std::string synthetic_reply(llm::Stage stage, const std::string& prompt) {
  switch (stage) {
    case llm::Stage::explain_chapters:
      return explain(prompt);
    case llm::Stage::expand_chapters:
      return expand(prompt);
    case llm::Stage::generate_titles:
      return titles(prompt);
    case llm::Stage::generate_stories:
      return story(prompt);
    case llm::Stage::evaluate_models:
      return judge(prompt);
  }
  return "";
}

std::unique_ptr<llm::Backend> synthetic_backend() { return std::make_unique<llm::ScriptedBackend>(synthetic_reply); }

}  // namespace ssbench::testing
