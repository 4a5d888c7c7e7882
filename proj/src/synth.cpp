#include "darja/synth.hpp"

#include <array>

#include "darja/unicode.hpp"

namespace darja {

namespace {

struct IntentSpec {
    const char* name;
    std::vector<const char*> latin;
    std::vector<const char*> arabic;
    std::vector<const char*> latin_tail;
    std::vector<const char*> arabic_tail;
};

// Routine intents first; several share vocabulary on purpose (internet, forfait,
// puce, numéro) so the classifier has to use more than one keyword.
const std::vector<IntentSpec>& specs() {
    static const std::vector<IntentSpec> s = {
        {"balance_check",
         {"nchouf solde", "chhal baqili f solde", "solde ta3i", "kifash na3ref solde ta3i", "chhal 3andi f compte"},
         {"نشوف الرصيد", "شحال بقالي في الرصيد", "الرصيد تاعي", "كيفاش نعرف الرصيد"},
         {"ta3 telephone", "daba", "li baqi"},
         {"تاع التليفون", "دروك", "اللي بقا"}},
        {"recharge",
         {"nrechargi", "ndir flexy", "recharge ma dakhletch", "carte recharge ma khdmetch", "nchargi telephone"},
         {"نشحن الرصيد", "ندير فليكسي", "كارت الشحن ما خدمتش", "الشحن ما دخلش"},
         {"b carte", "100 da", "men lbareh"},
         {"بالكارطة", "100 دينار", "من البارح"}},
        {"internet_bundle",
         {"forfait internet", "pass internet", "les go kemlou", "nchri internet", "n7eb internet bzzaf"},
         {"باقة الانترنت", "نشري انترنت", "الجيقا كملو", "فورفي انترنت"},
         {"ta3 simana", "4g", "l chhar"},
         {"تاع السيمانة", "4g", "للشهر"}},
        {"roaming",
         {"roaming f l'etranger", "nsafer w n7eb telephone ykhdem", "itinerance", "puce f fransa", "nsafer l tounes"},
         {"التجوال الدولي", "نسافر للخارج", "الشريحة في فرنسا", "نسافر لتونس"},
         {"ghodwa", "had sif", "f la frontiere"},
         {"غدوة", "هاد الصيف", "في الحدود"}},
        {"puk_code",
         {"code puk", "puce bloquee", "carte sim mbloquiya", "dert code ghalet 3 marrat", "telephone ytalab puk"},
         {"كود بوك", "الشريحة مبلوكية", "درت الكود غالط", "التليفون يطلب بوك"},
         {"ma na3rafch", "3awenni", "daba"},
         {"ما نعرفش", "عاوني", "دروك"}},
        {"call_forwarding",
         {"renvoi d'appel", "ndir transfert les appels", "n7awel les appels", "appels yrou7ou l numero akhor"},
         {"تحويل المكالمات", "نحول المكالمات لنمرة أخرى", "المكالمات يروحو لرقم آخر"},
         {"l numero ta3 lkhedma", "ki nkoun mashghoul", "f lil"},
         {"لرقم الخدمة", "كي نكون مشغول", "في الليل"}},
        {"sim_swap",
         {"nbeddel la puce", "puce jdida", "changement sim", "puce tkasret", "n7eb nano sim"},
         {"نبدل الشريحة", "شريحة جديدة", "الشريحة تكسرت", "نحب نانو سيم"},
         {"b nafs numero", "l telephone jdid", "ta3 esim"},
         {"بنفس الرقم", "للتليفون الجديد", "تاع esim"}},
        {"lost_phone",
         {"telephone ta3i ray7", "sarqouli portable", "tlef telephone", "dayya3t telephone", "portable tsreq"},
         {"ضاع التليفون", "سرقولي التليفون", "التليفون تسرق", "ضيعت البورطابل"},
         {"f tobis", "lbareh", "f souq"},
         {"في الطوبيس", "البارح", "في السوق"}},
        {"complaint_network",
         {"reseau ma kach", "makach reseau", "coupure reseau", "reseau ta3kom khayeb", "ma ndirch appel"},
         {"ماكاش الريزو", "الشبكة مقطوعة", "الريزو تاعكم خايب", "ما نقدرش نعيط"},
         {"f dar", "men sba7", "f l7ouma"},
         {"في الدار", "من الصباح", "في الحومة"}},
        {"bill_payment",
         {"nkhalles facture", "paiement facture", "facture ta3 chhar", "nkhalles b edahabia", "facture ghalia"},
         {"نخلص الفاتورة", "فاتورة الشهر", "نخلص بالذهبية", "الفاتورة غالية"},
         {"ta3 postpaid", "f la poste", "had chhar"},
         {"تاع الاشتراك", "في البوسطة", "هاد الشهر"}},
        {"number_portability",
         {"nguelleb numero l operateur", "portabilite numero", "nkhalli numero w nbeddel operateur", "ndi numero m3aya"},
         {"نحول الرقم لمتعامل آخر", "نقل الرقم", "نخلي الرقم ونبدل المتعامل"},
         {"men djezzy", "men ooredoo", "bla ma nbeddel"},
         {"من جيزي", "من أوريدو", "بلا ما نبدل"}},
        {"voicemail",
         {"messagerie vocale", "repondeur", "nsma3 les messages vocaux", "nhabes repondeur"},
         {"البريد الصوتي", "الرسائل الصوتية", "نحبس الريبوندور", "نسمع الرسائل الصوتية"},
         {"ki ma nrepondich", "code ta3 messagerie", "daba"},
         {"كي ما نردش", "الكود تاع البريد", "دروك"}},
        {"sms_bundle",
         {"forfait sms", "pack messages", "nb3at sms bzzaf", "sms illimite", "les sms kemlou"},
         {"باقة الرسائل", "رسائل قصيرة", "الميساجات كملو", "ميساجات بلا حساب"},
         {"l chhar", "ta3 simana", "l ga3 les reseaux"},
         {"للشهر", "تاع السيمانة", "لكل الشبكات"}},
        {"change_offer",
         {"nbeddel l'offre", "changer d'offre", "n7eb offre okhra", "nkhrej men had l'offre", "nwelli postpaid"},
         {"نبدل العرض", "عرض آخر", "نخرج من هاد العرض", "نولي اشتراك"},
         {"li ana fiha", "men ghodwa", "bla frais"},
         {"اللي راني فيه", "من غدوة", "بلا مصاريف"}},
        {"customer_service",
         {"nahder m3a conseiller", "service client", "numero ta3 service client", "n7eb nahder m3a wahed", "conseiller 3afak"},
         {"نهدر مع مستشار", "خدمة الزبائن", "رقم خدمة الزبائن", "نحب نهدر مع واحد"},
         {"daba daba", "bnadem machi robot", "urgent"},
         {"دروك دروك", "بنادم ماشي روبو", "مستعجل"}},
        {"transfer_credit",
         {"nb3at credit l sa7bi", "transfert credit", "partage solde", "nsellef credit", "nb3at flexy l khouya"},
         {"نبعث الرصيد لصاحبي", "تحويل الرصيد", "نسلف الرصيد", "نبعث فليكسي لخويا"},
         {"50 da", "l numero akhor", "men 3andi"},
         {"50 دينار", "لرقم آخر", "من عندي"}},
        {"loyalty_points",
         {"les points fidelite", "nconverti les points", "chhal 3andi points", "cadeaux ta3 points", "bonus fidelite"},
         {"نقاط الوفاء", "شحال عندي نقاط", "نبدل النقاط", "الهدايا تاع النقاط"},
         {"li jma3t", "had l3am", "b cadeaux"},
         {"اللي جمعت", "هاد العام", "بالهدايا"}},
        {"device_unlock",
         {"debloquer telephone", "desimlocker portable", "code deblocage", "telephone ma yqbalch puce okhra"},
         {"فتح التليفون", "كود فك القفل", "التليفون ما يقبلش شريحة أخرى", "نفك القفل تاع البورطابل"},
         {"li chrit men 3andkom", "samsung", "bla code"},
         {"اللي شريت من عندكم", "سامسونغ", "بلا كود"}},
        {"apn_settings",
         {"parametres internet", "configuration apn", "internet ma yemchich f telephone", "reglage mms", "apn ta3kom"},
         {"إعدادات الانترنت", "ضبط الانترنت", "الانترنت ما يمشيش في التليفون", "ضبط apn"},
         {"f iphone", "ba3d mise a jour", "telephone jdid"},
         {"في الايفون", "بعد التحديث", "تليفون جديد"}},
        {"offer_info",
         {"wach kayen offres jdad", "les offres ta3kom", "chhal soum l'offre", "wach fiha l'offre pixx", "ach hiya offre sama"},
         {"واش كاين عروض جديدة", "العروض تاعكم", "شحال سوم العرض", "واش فيه عرض حضرة"},
         {"had chhar", "l chabab", "b 1000 da"},
         {"هاد الشهر", "للشباب", "بألف دينار"}},
    };
    return s;
}

constexpr std::array<const char*, 12> kLatinFrames = {
    "{}", "salam {}", "{} svp", "3afak {}", "bghit {}", "n7eb {}", "kifash {}", "wach {}",
    "slm khouya {}", "{} merci", "ana {}", "ya3tik saha {}"};
constexpr std::array<const char*, 10> kArabicFrames = {
    "{}", "السلام عليكم {}", "{} من فضلك", "عافاك {}", "نحب {}", "كيفاش {}", "واش {}", "خويا {}",
    "{} يعطيك الصحة", "صباح الخير {}"};

template <typename Seq>
const char* pick(const Seq& items, Rng& rng) {
    return items[static_cast<std::size_t>(rng.below(items.size()))];
}

std::string fill(std::string_view frame, std::string_view body) {
    std::string out(frame);
    const auto at = out.find("{}");
    out.replace(at, 2, body);
    return out;
}

}  // namespace

const std::vector<std::string>& synthetic_intents() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& s : specs()) v.emplace_back(s.name);
        return v;
    }();
    return names;
}

namespace noise {

std::string elongate(std::string_view text, Rng& rng) {
    auto cps = unicode::decode(text);
    std::vector<std::size_t> letters;
    for (std::size_t i = 0; i < cps.size(); ++i)
        if (unicode::is_letter(cps[i])) letters.push_back(i);
    if (letters.empty()) return std::string(text);
    const auto at = letters[rng.below(letters.size())];
    const auto extra = 2 + rng.below(4);
    cps.insert(cps.begin() + static_cast<std::ptrdiff_t>(at), extra, cps[at]);
    return unicode::encode(cps);
}

std::string arabizi_digit(std::string_view text, Rng& rng) {
    std::string out(text);
    std::vector<std::size_t> spots;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i] == 'a' || out[i] == 'h' || out[i] == 'q') spots.push_back(i);
    if (spots.empty()) return out;
    auto& c = out[spots[rng.below(spots.size())]];
    c = c == 'a' ? '3' : c == 'h' ? '7' : '9';
    return out;
}

std::string alef_variant(std::string_view text, Rng& rng) {
    auto cps = unicode::decode(text);
    std::vector<std::size_t> spots;
    for (std::size_t i = 0; i < cps.size(); ++i)
        if (cps[i] == U'ا' || cps[i] == U'ة' || cps[i] == U'ي') spots.push_back(i);
    if (spots.empty()) return std::string(text);
    auto& c = cps[spots[rng.below(spots.size())]];
    if (c == U'ا') {
        static constexpr char32_t alefs[] = {U'أ', U'إ', U'آ'};
        c = alefs[rng.below(3)];
    } else {
        c = c == U'ة' ? U'ه' : U'ى';
    }
    return unicode::encode(cps);
}

std::string random_case(std::string_view text, Rng& rng) {
    std::string out(text);
    const bool whole = rng.below(4) == 0;
    for (auto& c : out)
        if (c >= 'a' && c <= 'z' && (whole || rng.below(3) == 0)) c = static_cast<char>(c - 'a' + 'A');
    return out;
}

}  // namespace noise

Dataset synthesize_corpus(const SynthOptions& options) {
    Dataset ds;
    ds.script = Script::Latin;  // mixed; normalize detects per utterance
    Rng rng(mix64(options.seed));
    for (const auto& spec : specs()) {
        for (std::size_t i = 0; i < options.per_intent; ++i) {
            const bool arabic = rng.uniform() < options.arabic_share;
            std::string body = arabic ? pick(spec.arabic, rng) : pick(spec.latin, rng);
            if (rng.uniform() < 0.4) {
                body += ' ';
                body += arabic ? pick(spec.arabic_tail, rng) : pick(spec.latin_tail, rng);
            }
            auto text = fill(arabic ? pick(kArabicFrames, rng) : pick(kLatinFrames, rng), body);
            if (rng.uniform() < options.noise_rate) text = noise::elongate(text, rng);
            if (arabic) {
                if (rng.uniform() < options.noise_rate) text = noise::alef_variant(text, rng);
            } else {
                if (rng.uniform() < options.noise_rate) text = noise::arabizi_digit(text, rng);
                if (rng.uniform() < options.noise_rate) text = noise::random_case(text, rng);
            }
            LabeledExample ex;
            ex.utterance.text = std::move(text);
            ex.utterance.source_tag = "synth";
            ex.intent = spec.name;
            ds.examples.push_back(std::move(ex));
        }
    }
    return ds;
}

}  // namespace darja
