// Pinned word lists: the feature schema names, the 17 function-word
// distance targets, the 175-word stopword list, and the default
// neologism lexicon. Tests depend on these verbatim; changing any list
// is a schema version bump.

#include <array>
#include <string>
#include <unordered_set>
#include <vector>

#include "tempora/features.hpp"

namespace tempora::features {

const char* to_string(Domain domain) {
    switch (domain) {
        case Domain::compression: return "compression";
        case Domain::lexical_structure: return "lexical_structure";
        case Domain::readability: return "readability";
        case Domain::neologism: return "neologism";
        case Domain::distance: return "distance";
    }
    return "compression";
}

const std::array<std::string, kFunctionWordCount>& function_words() {
    static const std::array<std::string, kFunctionWordCount> words = {
        "at", "by", "for", "in", "of", "on", "to", "with", "the",
        "a", "an", "is", "was", "and", "as", "that", "it"};
    return words;
}

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n = {
            "shannon_entropy",
            "nrc_o1",
            "nrc_o2",
            "entropy_ratio_o1",
            "entropy_ratio_o2",
            "compression_ratio_o1",
            "compression_ratio_o2",
            "avg_word_length",
            "lexical_richness",
            "avg_sentence_length",
            "syllables_per_word",
            "punctuation_density",
            "uppercase_ratio",
            "digit_ratio",
            "flesch_reading_ease",
            "stopword_ratio",
        };
        for (int p = 1; p <= 8; ++p) {
            n.push_back("neo_period_" + std::to_string(p));
        }
        n.push_back("neo_early_era_any");
        n.push_back("neo_modern_era_any");
        n.push_back("neo_vocabulary_modernity");
        for (const auto& w : function_words()) {
            n.push_back("dist_" + w);
        }
        return n;
    }();
    return names;
}

Domain feature_domain(std::size_t index) {
    if (index < 7) return Domain::compression;
    if (index < 14) return Domain::lexical_structure;
    if (index < 16) return Domain::readability;
    if (index < 27) return Domain::neologism;
    return Domain::distance;
}

std::ptrdiff_t feature_index(std::string_view name) {
    const auto& names = feature_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
}

const std::unordered_set<std::string>& stopword_set() {
    static const std::unordered_set<std::string> words = {
        "a", "about", "above", "across", "after", "again", "against", "all",
        "almost", "along", "also", "although", "am", "among", "an", "and",
        "another", "any", "anybody", "anyone", "anything", "are", "around",
        "as", "at", "be", "because", "been", "before", "behind", "being",
        "below", "beneath", "beside", "besides", "between", "beyond", "both",
        "but", "by", "can", "cannot", "could", "despite", "did", "do", "does",
        "doing", "down", "during", "each", "either", "enough", "every",
        "everybody", "everyone", "everything", "few", "for", "from", "further",
        "had", "has", "have", "having", "he", "her", "hers", "herself", "him",
        "himself", "his", "how", "however", "i", "if", "in", "into", "is",
        "it", "its", "itself", "just", "may", "me", "might", "mine", "more",
        "most", "much", "must", "my", "myself", "near", "neither", "no",
        "nobody", "none", "nor", "not", "nothing", "now", "of", "off", "on",
        "once", "only", "onto", "or", "other", "others", "ought", "our",
        "ours", "ourselves", "out", "over", "own", "per", "rather", "same",
        "shall", "she", "should", "since", "so", "some", "somebody",
        "someone", "something", "soon", "still", "such", "than", "that",
        "the", "their", "theirs", "them", "themselves", "then", "there",
        "these", "they", "this", "those", "through", "throughout", "till",
        "to", "too", "toward", "towards", "under", "until", "up", "upon",
        "us", "very", "was", "we", "were", "what", "when", "where",
        "whether", "which", "while", "who", "whom", "whose", "will", "with",
        "within", "would"};
    return words;
}

const NeologismLexicon& default_lexicon() {
    static const NeologismLexicon lexicon = [] {
        NeologismLexicon lx;
        lx.modern_cutoff_year = 1900;
        lx.periods = {
            {"early_modern", 1600, 1749,
             {"telescope", "microscope", "gravity", "pendulum", "barometer",
              "thermometer", "almanack", "musket", "frigate", "colony",
              "plantation", "gazette", "coffeehouse", "longitude", "quadrant",
              "calculus", "apothecary", "smallpox", "quill", "parchment",
              "sundial", "doublet", "breeches", "farthing", "periwig"}},
            {"enlightenment", 1750, 1799,
             {"oxygen", "hydrogen", "nitrogen", "phlogiston", "caloric",
              "guillotine", "vaccination", "encyclopedia", "piano", "waltz",
              "bifocals", "parachute", "ambulance", "centigrade",
              "chronometer", "mesmerism", "montgolfier", "quadrille",
              "republicanism", "utilitarian", "caucus", "lithograph",
              "semaphore", "cotillion", "balloonist"}},
            {"early_industrial", 1800, 1849,
             {"locomotive", "railway", "telegraph", "photograph",
              "daguerreotype", "stethoscope", "dinosaur", "scientist",
              "paleontology", "anesthesia", "morphine", "electromagnet",
              "revolver", "macadam", "omnibus", "kindergarten", "socialism",
              "gerrymander", "blizzard", "vulcanized", "phrenology",
              "chloroform", "stereoscope", "galvanized", "sociology"}},
            {"late_industrial", 1850, 1899,
             {"telephone", "phonograph", "bicycle", "automobile", "electron",
              "microbe", "dynamite", "typewriter", "elevator", "refrigerator",
              "pasteurize", "aspirin", "kinetoscope", "gramophone",
              "linotype", "radiography", "telegraphy", "motorcar",
              "seismograph", "stenographer", "telegram", "celluloid",
              "chauffeur", "incandescent", "monorail"}},
            {"early_twentieth", 1900, 1949,
             {"airplane", "radio", "television", "penicillin", "radar",
              "jeep", "bulldozer", "robot", "vitamin", "insulin", "jazz",
              "cinema", "suffragette", "zeppelin", "gene", "isotope",
              "hormone", "allergy", "escalator", "helicopter", "astronaut",
              "nylon", "teenager", "genocide", "antibiotic"}},
            {"mid_twentieth", 1950, 1979,
             {"laser", "transistor", "software", "mainframe", "aerospace",
              "microchip", "quasar", "pulsar", "hovercraft", "discotheque",
              "hippie", "byte", "pixel", "modem", "cursor", "biofeedback",
              "skateboard", "sitcom", "cosmonaut", "minicomputer",
              "countdown", "megabyte", "videotape", "breathalyzer",
              "cryonics"}},
            {"late_twentieth", 1980, 1999,
             {"internet", "email", "website", "cyberspace", "emoticon",
              "camcorder", "spreadsheet", "laptop", "blog", "webpage",
              "hyperlink", "nanotechnology", "malware", "netizen", "dotcom",
              "ringtone", "snowboard", "karaoke", "cellphone", "voicemail",
              "minivan", "infomercial", "gigabyte", "newsgroup",
              "screensaver"}},
            {"digital", 2000, 2020,
             {"smartphone", "podcast", "selfie", "hashtag", "vlog", "emoji",
              "bitcoin", "blockchain", "crowdfunding", "cryptocurrency",
              "unfriend", "retweet", "photobomb", "clickbait", "mansplain",
              "staycation", "bromance", "sexting", "deepfake",
              "microplastic", "gamify", "doomscroll", "livestream",
              "crowdsource", "geotag"}},
        };
        validate_lexicon(lx);
        return lx;
    }();
    return lexicon;
}

}  // namespace tempora::features
