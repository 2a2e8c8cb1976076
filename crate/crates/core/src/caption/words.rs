//! Closed word lists for the rule parser.

pub(super) const DETERMINERS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "some", "several", "many", "few", "each",
    "every", "another", "both", "all", "any", "no", "its", "their", "his", "her", "our", "my",
    "your", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "dozen", "multiple", "various", "numerous", "other", "such", "more", "most", "lots",
    "plenty", "couple", "pair", "group", "bunch",
];

pub(super) const PRONOUNS: &[&str] = &[
    "there", "it", "they", "them", "he", "she", "we", "i", "you", "which", "who", "whom",
    "whose", "what", "where", "when", "while", "others", "itself", "themselves", "something",
    "someone", "anything", "everything", "nothing", "here", "whereas", "as", "if", "than",
];

pub(super) const AUXILIARIES: &[&str] = &[
    "is", "are", "was", "were", "be", "been", "being", "am", "has", "have", "had", "can",
    "could", "will", "would", "may", "might", "does", "do", "did", "seem", "seems", "appear",
    "appears", "s",
];

pub(super) const PREPOSITIONS: &[&str] = &[
    "in", "on", "at", "of", "with", "near", "under", "above", "below", "behind", "beside",
    "besides", "between", "by", "down", "up", "along", "across", "over", "into", "onto",
    "through", "around", "against", "inside", "outside", "next", "to", "from", "toward",
    "towards", "beneath", "among", "atop", "underneath", "past", "off", "out", "front",
    "beyond", "within", "throughout", "upon", "alongside", "amid", "amidst", "like", "via",
    "before", "after", "during", "for", "without", "away", "back", "top", "onto", "about",
];

pub(super) const CONJUNCTIONS: &[&str] = &["and", "or", "but", "nor", "&", "plus", "yet"];

pub(super) const ADVERBS: &[&str] = &[
    "not", "very", "quite", "rather", "also", "too", "just", "still", "even", "almost", "only",
    "mostly", "partially", "partly", "slightly", "somewhat", "together", "nearby", "perhaps",
    "possibly", "likely", "well", "then", "now", "again", "already", "always", "often",
];

pub(super) const ADJECTIVES: &[&str] = &[
    "red", "white", "green", "blue", "black", "yellow", "orange", "purple", "pink", "brown",
    "gray", "grey", "golden", "silver", "beige", "tan", "turquoise", "teal", "maroon", "navy",
    "crimson", "violet", "dark", "light", "bright", "pale", "colorful", "colourful",
    "multicolored", "vibrant", "reddish", "whitish", "bluish", "greenish", "tall", "short",
    "small", "large", "big", "little", "huge", "tiny", "long", "wide", "narrow", "high", "low",
    "round", "square", "rectangular", "circular", "flat", "thick", "thin", "giant", "massive",
    "enormous", "old", "new", "young", "modern", "ancient", "busy", "clear", "peaceful", "soft",
    "hard", "wooden", "empty", "full", "clean", "dirty", "wet", "dry", "sunny", "cloudy",
    "rainy", "snowy", "foggy", "calm", "quiet", "beautiful", "lush", "sandy", "rocky",
    "grassy", "open", "closed", "striped", "spotted", "fluffy", "furry", "shiny", "sleek",
    "cozy", "crowded", "bare", "leafy", "tropical", "urban", "rural", "distant", "fresh",
    "ripe", "hot", "cold", "warm", "cool", "heavy", "curly", "lonely", "lovely", "friendly",
    "ugly", "silly", "hilly", "early", "elderly", "chilly", "woolly", "bubbly", "blond",
    "blonde", "bald", "plain", "simple", "fancy", "elegant", "rustic", "vintage", "sturdy",
    "delicious", "tasty", "healthy", "single", "double", "sharp", "smooth", "rough", "dense",
    "sparse", "steep", "male", "female", "blurry", "gentle", "wild", "domestic", "stainless",
    "transparent", "shallow", "deep", "ornate", "decorative", "pretty", "cute", "happy",
    "sad", "adult", "main", "front", "rear", "upper", "lower", "left", "right", "middle",
    "central", "overcast", "wavy", "snowcapped", "cluttered", "tidy", "neat", "messy",
];

/// Base forms of common caption verbs.
pub(super) const VERBS: &[&str] = &[
    "stand", "sit", "lie", "hold", "ride", "run", "walk", "wear", "eat", "drive", "surround",
    "cover", "contain", "carry", "fly", "graze", "roll", "stretch", "hang", "lean", "overlook",
    "hover", "perch", "float", "swim", "climb", "jump", "chase", "pull", "push", "throw",
    "catch", "kick", "fill", "reflect", "border", "display", "include", "show", "depict",
    "sleep", "play", "look", "appear", "cross", "approach", "enter", "follow", "wait", "sail",
    "glide", "dangle", "crawl", "rise", "sink", "shine", "grow", "hug", "fight", "read",
    "prepare", "serve", "sell", "buy", "use", "hit", "feature", "line", "bear", "gaze",
    "stare", "smile", "talk", "surf", "skate", "ski", "fall", "drink", "cook", "stack",
];

/// Irregular verb forms and their lemmas.
pub(super) const IRREGULAR_VERBS: &[(&str, &str)] = &[
    ("sat", "sit"),
    ("stood", "stand"),
    ("lying", "lie"),
    ("held", "hold"),
    ("rode", "ride"),
    ("ran", "run"),
    ("wore", "wear"),
    ("ate", "eat"),
    ("flew", "fly"),
    ("hung", "hang"),
    ("sank", "sink"),
    ("grew", "grow"),
    ("shone", "shine"),
    ("caught", "catch"),
    ("threw", "throw"),
    ("fought", "fight"),
    ("bought", "buy"),
    ("sold", "sell"),
    ("seen", "see"),
    ("worn", "wear"),
    ("eaten", "eat"),
    ("flown", "fly"),
    ("grown", "grow"),
    ("hidden", "hide"),
    ("ridden", "ride"),
    ("taken", "take"),
    ("thrown", "throw"),
    ("fallen", "fall"),
    ("written", "write"),
    ("drawn", "draw"),
    ("driven", "drive"),
    ("given", "give"),
    ("broken", "break"),
    ("frozen", "freeze"),
    ("dying", "die"),
    ("tying", "tie"),
    ("opening", "open"),
    ("opened", "open"),
];

/// Nouns that the `-ing`, `-ed` and `-ly` suffix rules would misread.
pub(super) const NOUN_EXCEPTIONS: &[&str] = &[
    "building", "ceiling", "clothing", "painting", "railing", "ring", "king", "string",
    "thing", "wing", "spring", "evening", "morning", "sibling", "swing", "awning", "wedding",
    "pudding", "icing", "topping", "bedding", "fencing", "parking", "lighting", "stocking",
    "seating", "housing", "frosting", "filling", "stuffing", "dressing", "landing", "sapling",
    "bed", "shed", "sled", "seed", "weed", "reed", "steed", "hundred", "family", "lily",
    "belly", "jelly", "butterfly", "dragonfly", "rally", "ally", "holly", "supply",
    "assembly", "trolley", "olive", "hive",
];

/// Scene-framing nouns; never reported as objects.
pub(super) const FRAME_NOUNS: &[&str] = &[
    "background", "foreground", "distance", "scene", "image", "picture", "photo",
    "photograph", "view", "shot", "frame", "setting",
];

/// Noun-noun compounds kept as a single object.
pub(super) const COMPOUNDS: &[&str] = &[
    "city street", "traffic light", "stop sign", "fire hydrant", "parking lot",
    "tennis racket", "tennis court", "tennis ball", "baseball bat", "baseball field",
    "baseball player", "teddy bear", "cell phone", "living room", "dining table",
    "ice cream", "street sign", "street light", "police car", "fire truck", "school bus",
    "bus stop", "train station", "coffee table", "coffee cup", "soccer ball", "beach umbrella",
    "surf board", "power line", "brick wall", "wine glass", "tree trunk", "road sign",
    "side walk", "water bottle", "computer monitor", "pizza box", "ocean wave",
];
