#include "hft/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include "hft/error.hpp"

namespace hft {

SynonymLexicon::SynonymLexicon(std::span<const std::pair<std::string, std::string>> pairs) {
  auto add = [this](const std::string& a, const std::string& b) {
    auto& list = table_[a];
    if (std::find(list.begin(), list.end(), b) != list.end()) return false;
    list.push_back(b);
    return true;
  };
  for (const auto& [a, b] : pairs) {
    if (a.empty() || b.empty() || a == b) continue;
    const bool fresh = add(a, b);
    add(b, a);
    if (fresh) ++pair_count_;
  }
  for (auto& [word, list] : table_) std::sort(list.begin(), list.end());
}

bool SynonymLexicon::contains(std::string_view word) const { return table_.find(word) != table_.end(); }

std::span<const std::string> SynonymLexicon::synonyms(std::string_view word) const {
  const auto it = table_.find(word);
  if (it == table_.end()) return {};
  return it->second;
}

std::span<const std::pair<std::string, std::string>> default_synonym_pairs() {
  static const std::vector<std::pair<std::string, std::string>> pairs = {
    {"cure", "heal"},
    {"cure", "remedy"},
    {"cure", "treat"},
    {"cures", "heals"},
    {"cures", "remedies"},
    {"cures", "treats"},
    {"cured", "healed"},
    {"cured", "treated"},
    {"virus", "pathogen"},
    {"virus", "germ"},
    {"viruses", "pathogens"},
    {"viruses", "germs"},
    {"disease", "illness"},
    {"disease", "sickness"},
    {"disease", "ailment"},
    {"diseases", "illnesses"},
    {"diseases", "ailments"},
    {"infection", "contagion"},
    {"infected", "contaminated"},
    {"spread", "transmission"},
    {"spreading", "transmitting"},
    {"spreading", "circulating"},
    {"doctor", "physician"},
    {"doctor", "medic"},
    {"doctors", "physicians"},
    {"doctors", "medics"},
    {"hospital", "clinic"},
    {"hospital", "infirmary"},
    {"hospitals", "clinics"},
    {"patient", "sufferer"},
    {"patients", "sufferers"},
    {"medicine", "medication"},
    {"medicine", "drug"},
    {"medicines", "medications"},
    {"medicines", "drugs"},
    {"vaccine", "inoculation"},
    {"vaccine", "jab"},
    {"vaccines", "inoculations"},
    {"vaccines", "jabs"},
    {"vaccinated", "immunised"},
    {"vaccinated", "immunized"},
    {"vaccinated", "inoculated"},
    {"test", "exam"},
    {"test", "check"},
    {"tests", "exams"},
    {"tests", "checks"},
    {"testing", "screening"},
    {"tested", "screened"},
    {"result", "outcome"},
    {"result", "finding"},
    {"results", "outcomes"},
    {"results", "findings"},
    {"study", "research"},
    {"study", "investigation"},
    {"studies", "investigations"},
    {"researchers", "scientists"},
    {"researchers", "investigators"},
    {"scientist", "researcher"},
    {"expert", "specialist"},
    {"expert", "authority"},
    {"experts", "specialists"},
    {"experts", "authorities"},
    {"official", "officer"},
    {"officials", "officers"},
    {"government", "administration"},
    {"ministry", "department"},
    {"minister", "secretary"},
    {"report", "account"},
    {"report", "statement"},
    {"reports", "accounts"},
    {"reports", "statements"},
    {"reported", "stated"},
    {"reported", "noted"},
    {"announced", "declared"},
    {"announced", "proclaimed"},
    {"announce", "declare"},
    {"announce", "proclaim"},
    {"confirmed", "verified"},
    {"confirmed", "validated"},
    {"confirm", "verify"},
    {"confirm", "validate"},
    {"claim", "assertion"},
    {"claim", "allegation"},
    {"claims", "assertions"},
    {"claims", "allegations"},
    {"claimed", "alleged"},
    {"claimed", "asserted"},
    {"rumor", "rumour"},
    {"rumor", "gossip"},
    {"rumor", "hearsay"},
    {"rumors", "rumours"},
    {"rumors", "gossips"},
    {"fake", "false"},
    {"fake", "bogus"},
    {"fake", "phony"},
    {"hoax", "fraud"},
    {"hoax", "scam"},
    {"hoax", "sham"},
    {"hoaxes", "frauds"},
    {"hoaxes", "scams"},
    {"secret", "hidden"},
    {"secret", "covert"},
    {"secretly", "covertly"},
    {"miracle", "marvel"},
    {"miracle", "wonder"},
    {"miraculous", "marvelous"},
    {"miraculous", "wondrous"},
    {"shocking", "startling"},
    {"shocking", "alarming"},
    {"shocking", "appalling"},
    {"banned", "prohibited"},
    {"banned", "forbidden"},
    {"banned", "outlawed"},
    {"ban", "prohibition"},
    {"ban", "embargo"},
    {"exposed", "revealed"},
    {"exposed", "uncovered"},
    {"exposed", "unmasked"},
    {"expose", "reveal"},
    {"expose", "uncover"},
    {"expose", "unmask"},
    {"conspiracy", "plot"},
    {"conspiracy", "scheme"},
    {"conspiracies", "plots"},
    {"conspiracies", "schemes"},
    {"lie", "falsehood"},
    {"lie", "untruth"},
    {"lies", "falsehoods"},
    {"lies", "untruths"},
    {"true", "accurate"},
    {"true", "correct"},
    {"truth", "fact"},
    {"truth", "reality"},
    {"facts", "realities"},
    {"new", "novel"},
    {"new", "fresh"},
    {"case", "instance"},
    {"case", "incident"},
    {"cases", "instances"},
    {"cases", "incidents"},
    {"death", "fatality"},
    {"deaths", "fatalities"},
    {"died", "perished"},
    {"dead", "deceased"},
    {"number", "count"},
    {"number", "figure"},
    {"numbers", "counts"},
    {"numbers", "figures"},
    {"total", "sum"},
    {"total", "aggregate"},
    {"increase", "rise"},
    {"increase", "surge"},
    {"increase", "growth"},
    {"increased", "rose"},
    {"increased", "surged"},
    {"increased", "grew"},
    {"decrease", "decline"},
    {"decrease", "drop"},
    {"decrease", "fall"},
    {"decreased", "declined"},
    {"decreased", "dropped"},
    {"decreased", "fell"},
    {"large", "big"},
    {"large", "huge"},
    {"large", "massive"},
    {"small", "little"},
    {"small", "tiny"},
    {"small", "minor"},
    {"high", "elevated"},
    {"low", "reduced"},
    {"rapid", "fast"},
    {"rapid", "quick"},
    {"rapid", "swift"},
    {"rapidly", "quickly"},
    {"rapidly", "swiftly"},
    {"slow", "gradual"},
    {"slow", "sluggish"},
    {"slowly", "gradually"},
    {"today", "currently"},
    {"today", "presently"},
    {"recent", "latest"},
    {"recently", "lately"},
    {"people", "persons"},
    {"people", "individuals"},
    {"person", "individual"},
    {"citizens", "residents"},
    {"citizens", "inhabitants"},
    {"public", "populace"},
    {"country", "nation"},
    {"countries", "nations"},
    {"state", "province"},
    {"state", "region"},
    {"states", "provinces"},
    {"states", "regions"},
    {"city", "town"},
    {"city", "municipality"},
    {"cities", "towns"},
    {"area", "zone"},
    {"area", "district"},
    {"areas", "zones"},
    {"areas", "districts"},
    {"world", "globe"},
    {"global", "worldwide"},
    {"global", "international"},
    {"local", "regional"},
    {"national", "countrywide"},
    {"national", "nationwide"},
    {"help", "aid"},
    {"help", "assist"},
    {"help", "support"},
    {"helps", "aids"},
    {"helps", "assists"},
    {"helps", "supports"},
    {"helped", "aided"},
    {"helped", "assisted"},
    {"helped", "supported"},
    {"protect", "shield"},
    {"protect", "safeguard"},
    {"protect", "guard"},
    {"protection", "safeguard"},
    {"protection", "defence"},
    {"protection", "defense"},
    {"prevent", "avert"},
    {"prevent", "stop"},
    {"prevention", "avoidance"},
    {"measures", "steps"},
    {"measures", "actions"},
    {"measure", "step"},
    {"measure", "action"},
    {"rule", "regulation"},
    {"rules", "regulations"},
    {"guidelines", "guidance"},
    {"guidelines", "directives"},
    {"advice", "counsel"},
    {"advice", "recommendation"},
    {"recommend", "advise"},
    {"recommend", "suggest"},
    {"recommended", "advised"},
    {"recommended", "suggested"},
    {"warn", "caution"},
    {"warn", "alert"},
    {"warned", "cautioned"},
    {"warned", "alerted"},
    {"warning", "caution"},
    {"warning", "alert"},
    {"danger", "hazard"},
    {"danger", "risk"},
    {"danger", "threat"},
    {"dangerous", "hazardous"},
    {"dangerous", "risky"},
    {"dangerous", "perilous"},
    {"safe", "secure"},
    {"safe", "harmless"},
    {"safety", "security"},
    {"symptoms", "signs"},
    {"symptoms", "indications"},
    {"symptom", "sign"},
    {"symptom", "indication"},
    {"fever", "temperature"},
    {"cough", "hack"},
    {"breathe", "respire"},
    {"breathing", "respiration"},
    {"mask", "face-covering"},
    {"masks", "face-coverings"},
    {"wear", "don"},
    {"distance", "space"},
    {"distance", "gap"},
    {"isolation", "quarantine"},
    {"isolation", "seclusion"},
    {"isolate", "quarantine"},
    {"isolate", "seclude"},
    {"lockdowns", "shutdowns"},
    {"lockdowns", "closures"},
    {"closed", "shut"},
    {"open", "reopen"},
    {"opened", "reopened"},
    {"school", "academy"},
    {"schools", "academies"},
    {"student", "pupil"},
    {"student", "learner"},
    {"students", "pupils"},
    {"students", "learners"},
    {"work", "job"},
    {"work", "employment"},
    {"work", "labor"},
    {"workers", "employees"},
    {"workers", "staff"},
    {"business", "company"},
    {"business", "firm"},
    {"business", "enterprise"},
    {"businesses", "companies"},
    {"businesses", "firms"},
    {"businesses", "enterprises"},
    {"economy", "market"},
    {"economic", "financial"},
    {"economic", "fiscal"},
    {"money", "cash"},
    {"money", "funds"},
    {"price", "cost"},
    {"prices", "costs"},
    {"buy", "purchase"},
    {"sell", "vend"},
    {"sold", "vended"},
    {"food", "nourishment"},
    {"water", "fluid"},
    {"drink", "beverage"},
    {"drinking", "consuming"},
    {"eat", "consume"},
    {"eat", "ingest"},
    {"hot", "warm"},
    {"hot", "heated"},
    {"cold", "chilly"},
    {"cold", "cool"},
    {"kill", "destroy"},
    {"kill", "eliminate"},
    {"kill", "eradicate"},
    {"kills", "destroys"},
    {"kills", "eliminates"},
    {"kills", "eradicates"},
    {"killed", "destroyed"},
    {"killed", "eliminated"},
    {"garlic", "allium"},
    {"lemon", "citrus"},
    {"remedy", "antidote"},
    {"natural", "organic"},
    {"natural", "herbal"},
    {"herbal", "botanical"},
    {"chemical", "substance"},
    {"chemical", "compound"},
    {"chemicals", "substances"},
    {"chemicals", "compounds"},
    {"spray", "mist"},
    {"sprayed", "misted"},
    {"claim", "contend"},
    {"video", "clip"},
    {"video", "footage"},
    {"videos", "clips"},
    {"photo", "picture"},
    {"photo", "image"},
    {"photo", "photograph"},
    {"photos", "pictures"},
    {"photos", "images"},
    {"photos", "photographs"},
    {"post", "message"},
    {"posts", "messages"},
    {"posted", "published"},
    {"posted", "shared"},
    {"share", "circulate"},
    {"share", "forward"},
    {"shared", "circulated"},
    {"shared", "forwarded"},
    {"social", "societal"},
    {"media", "press"},
    {"news", "tidings"},
    {"story", "tale"},
    {"story", "narrative"},
    {"stories", "tales"},
    {"stories", "narratives"},
    {"article", "piece"},
    {"articles", "pieces"},
    {"source", "origin"},
    {"sources", "origins"},
    {"website", "site"},
    {"website", "portal"},
    {"online", "internet"},
    {"online", "web"},
    {"message", "note"},
    {"viral", "widespread"},
    {"widely", "broadly"},
    {"widely", "extensively"},
    {"leader", "chief"},
    {"leader", "head"},
    {"leaders", "chiefs"},
    {"leaders", "heads"},
    {"president", "chairman"},
    {"team", "group"},
    {"team", "squad"},
    {"group", "cluster"},
    {"groups", "clusters"},
    {"member", "participant"},
    {"members", "participants"},
    {"plan", "strategy"},
    {"plan", "program"},
    {"plans", "strategies"},
    {"plans", "programs"},
    {"launch", "introduce"},
    {"launch", "initiate"},
    {"launched", "introduced"},
    {"launched", "initiated"},
    {"begin", "start"},
    {"begin", "commence"},
    {"began", "started"},
    {"began", "commenced"},
    {"end", "finish"},
    {"end", "conclude"},
    {"ended", "finished"},
    {"ended", "concluded"},
    {"continue", "persist"},
    {"continued", "persisted"},
    {"said", "stated"},
    {"said", "remarked"},
    {"say", "state"},
    {"say", "remark"},
    {"says", "states"},
    {"says", "remarks"},
    {"told", "informed"},
    {"tell", "inform"},
    {"show", "display"},
    {"show", "demonstrate"},
    {"show", "indicate"},
    {"shows", "displays"},
    {"shows", "demonstrates"},
    {"shows", "indicates"},
    {"showed", "displayed"},
    {"showed", "demonstrated"},
    {"showed", "indicated"},
    {"find", "discover"},
    {"find", "detect"},
    {"found", "discovered"},
    {"found", "detected"},
    {"need", "require"},
    {"needs", "requires"},
    {"needed", "required"},
    {"important", "significant"},
    {"important", "crucial"},
    {"important", "vital"},
    {"major", "key"},
    {"major", "principal"},
    {"best", "finest"},
    {"best", "optimal"},
    {"good", "fine"},
    {"good", "decent"},
    {"bad", "poor"},
    {"bad", "awful"},
    {"worse", "inferior"},
    {"strong", "powerful"},
    {"strong", "robust"},
    {"weak", "feeble"},
    {"weak", "frail"},
    {"effective", "efficient"},
    {"effective", "potent"},
    {"ineffective", "useless"},
    {"ineffective", "futile"},
    {"proven", "established"},
    {"proven", "demonstrated"},
    {"unproven", "unverified"},
    {"unproven", "untested"},
    {"evidence", "proof"},
    {"data", "information"},
    {"data", "statistics"},
    {"record", "log"},
    {"records", "logs"},
    {"daily", "everyday"},
    {"weekly", "hebdomadal"},
    {"week", "sennight"},
    {"month", "period"},
    {"day", "date"},
    {"time", "period"},
    {"hours", "hrs"},
    {"update", "bulletin"},
    {"updates", "bulletins"},
    {"latest", "newest"},
    {"total", "overall"},
    {"across", "throughout"},
    {"around", "approximately"},
    {"around", "roughly"},
    {"nearly", "almost"},
    {"many", "numerous"},
    {"several", "various"},
    {"several", "multiple"},
    {"some", "certain"},
    {"every", "each"},
    {"more", "additional"},
    {"more", "extra"},
    {"less", "fewer"},
    {"first", "initial"},
    {"last", "final"},
    {"next", "following"},
    {"previous", "prior"},
    {"previous", "earlier"},
    {"again", "anew"},
    {"also", "additionally"},
    {"still", "yet"},
    {"however", "nevertheless"},
    {"because", "since"},
    {"support", "backing"},
    {"oppose", "resist"},
    {"against", "versus"},
    {"citizen", "resident"},
    {"community", "neighbourhood"},
    {"community", "neighborhood"},
    {"family", "household"},
    {"children", "kids"},
    {"children", "youngsters"},
    {"child", "kid"},
    {"child", "youngster"},
    {"elderly", "aged"},
    {"old", "aged"},
    {"young", "youthful"},
    {"men", "males"},
    {"women", "females"},
    {"man", "male"},
    {"woman", "female"},
    {"home", "house"},
    {"home", "residence"},
    {"homes", "houses"},
    {"homes", "residences"},
    {"travel", "journey"},
    {"travel", "trip"},
    {"travellers", "travelers"},
    {"travellers", "passengers"},
    {"flight", "trip"},
    {"flights", "trips"},
    {"border", "frontier"},
    {"borders", "frontiers"},
    {"airport", "airfield"},
    {"train", "rail"},
    {"road", "street"},
    {"roads", "streets"},
    {"crowd", "throng"},
    {"crowds", "throngs"},
    {"gathering", "assembly"},
    {"gathering", "meeting"},
    {"gatherings", "assemblies"},
    {"gatherings", "meetings"},
    {"event", "occasion"},
    {"events", "occasions"},
    {"religious", "spiritual"},
    {"prayer", "worship"},
    {"celebrity", "star"},
    {"celebrities", "stars"},
    {"actor", "performer"},
    {"claims", "contentions"},
    {"suggest", "propose"},
    {"suggests", "proposes"},
    {"immunity", "resistance"},
    {"immune", "resistant"},
    {"boost", "strengthen"},
    {"boost", "enhance"},
    {"boosts", "strengthens"},
    {"boosts", "enhances"},
    {"weaken", "undermine"},
    {"body", "physique"},
    {"blood", "plasma"},
    {"lungs", "airways"},
    {"heart", "cardiac"},
    {"oxygen", "air"},
    {"ventilator", "respirator"},
    {"ventilators", "respirators"},
    {"bed", "cot"},
    {"beds", "cots"},
    {"supply", "provision"},
    {"supplies", "provisions"},
    {"shortage", "scarcity"},
    {"shortage", "deficit"},
    {"equipment", "gear"},
    {"equipment", "apparatus"},
    {"kit", "set"},
    {"kits", "sets"},
    {"trial", "experiment"},
    {"trials", "experiments"},
    {"approval", "authorization"},
    {"approval", "clearance"},
    {"approved", "authorized"},
    {"approved", "sanctioned"},
    {"develop", "create"},
    {"develop", "produce"},
    {"developed", "created"},
    {"developed", "produced"},
    {"develops", "creates"},
    {"develops", "produces"},
    {"company", "corporation"},
    {"laboratory", "lab"},
    {"laboratories", "labs"},
    {"sample", "specimen"},
    {"samples", "specimens"},
    {"positive", "affirmative"},
    {"negative", "adverse"},
    {"recovered", "recuperated"},
    {"recovery", "recuperation"},
    {"recover", "recuperate"},
    {"rate", "ratio"},
    {"rates", "ratios"},
    {"curve", "trend"},
    {"peak", "summit"},
    {"wave", "surge"},
    {"second", "subsequent"},
    {"third", "tertiary"},
    {"million", "millions"},
    {"billion", "billions"},
    {"percent", "percentage"},
    {"people", "folks"},
    {"false", "untrue"},
    {"false", "incorrect"},
    {"misleading", "deceptive"},
    {"misinformation", "disinformation"},
    {"baseless", "unfounded"},
    {"baseless", "groundless"},
    {"debunked", "refuted"},
    {"debunked", "disproved"},
    {"fact-check", "verification"},
    {"viral", "trending"},
    {"forward", "relay"},
    {"whatsapp", "messenger"},
    {"facebook", "social-network"},
    {"twitter", "microblog"},
  };
  return pairs;
}

const SynonymLexicon& default_lexicon() {
  static const SynonymLexicon lexicon(default_synonym_pairs());
  return lexicon;
}

SynonymLexicon parse_lexicon(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw Error(ErrorCode::MalformedRow, "lexicon line " + std::to_string(lineno) + " needs word<TAB>synonym",
                  lineno);
    }
    pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return SynonymLexicon(pairs);
}

SynonymLexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open lexicon " + path.string());
  return parse_lexicon(in);
}

}  // namespace hft
