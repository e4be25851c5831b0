"""Small embedded English word list backing the synthetic corpus generator."""

WORDS = (
    "able", "about", "account", "action", "active", "actor", "adapt", "admin",
    "adult", "advice", "agency", "agent", "agree", "ahead", "alarm", "album",
    "alert", "alien", "alley", "alloy", "alpha", "amber", "amount", "anchor",
    "angel", "angle", "animal", "answer", "apple", "apply", "april", "arcade",
    "arch", "arena", "argue", "armor", "array", "arrow", "artist", "aspect",
    "asset", "atlas", "attic", "audio", "august", "author", "autumn", "avenue",
    "awake", "award", "badge", "bagel", "baker", "balance", "ballad", "bamboo",
    "banana", "banner", "barley", "basket", "battery", "beach", "beacon",
    "beauty", "become", "belief", "bell", "bench", "berry", "better", "beyond",
    "billow", "binary", "birch", "bishop", "bistro", "blade", "blanket",
    "blossom", "board", "bonus", "border", "botany", "bottle", "boulder",
    "bounce", "branch", "brave", "bread", "breeze", "brick", "bridge", "bright",
    "broad", "bronze", "brook", "brush", "bubble", "bucket", "budget", "buffalo",
    "builder", "bundle", "bunker", "burger", "butter", "button", "cabin",
    "cable", "cactus", "camera", "campus", "canal", "candle", "canoe", "canvas",
    "canyon", "carbon", "career", "cargo", "carpet", "carrot", "castle",
    "casual", "cedar", "cellar", "census", "center", "cereal", "chain", "chair",
    "chalk", "chamber", "change", "chapel", "charm", "chart", "cheese", "cherry",
    "chess", "chief", "chorus", "cider", "cinema", "circle", "citizen", "citrus",
    "civil", "claim", "clarity", "classic", "clever", "client", "cliff",
    "climate", "clinic", "clock", "cloud", "clover", "coast", "cobalt", "coffee",
    "collar", "colony", "column", "comet", "comfort", "common", "compass",
    "concert", "condor", "copper", "coral", "corner", "cosmic", "cotton",
    "county", "courage", "course", "cousin", "cradle", "craft", "crater",
    "crayon", "cream", "credit", "cricket", "crisp", "crystal", "culture",
    "curious", "current", "curtain", "cycle", "daily", "dairy", "daisy",
    "dance", "dawn", "debate", "decade", "degree", "delta", "denim", "desert",
    "design", "detail", "device", "dialog", "diamond", "digital", "dinner",
    "direct", "domain", "donor", "double", "dozen", "dragon", "drama", "dream",
    "drift", "driver", "durable", "eager", "eagle", "early", "earth", "east",
    "easy", "echo", "eclipse", "editor", "effect", "effort", "eight", "elastic",
    "elbow", "elder", "electric", "element", "elite", "ember", "emerald",
    "empire", "energy", "engine", "enjoy", "enter", "entire", "envelope",
    "episode", "equal", "equator", "escape", "estate", "ethics", "event",
    "evening", "exact", "example", "expert", "export", "express", "fabric",
    "factor", "falcon", "family", "famous", "fancy", "farmer", "fashion",
    "feather", "fellow", "fence", "fern", "ferry", "fiber", "fiction", "field",
    "figure", "filter", "final", "finch", "finger", "fiscal", "flavor", "fleet",
    "floral", "flour", "flower", "fluent", "flute", "focus", "forest", "formal",
    "format", "fortune", "forum", "fossil", "foster", "fountain", "fresh",
    "friend", "frontier", "frost", "fruit", "future", "galaxy", "gallery",
    "garden", "garlic", "gather", "general", "gentle", "genuine", "giant",
    "ginger", "glacier", "glass", "global", "golden", "gospel", "grace",
    "grain", "grand", "granite", "graph", "gravel", "green", "grove", "guard",
    "guide", "guitar", "habit", "harbor", "harvest", "hazel", "health", "heart",
    "helmet", "herald", "hidden", "hiking", "hollow", "honey", "horizon",
    "hotel", "house", "humble", "hybrid", "ideal", "image", "impact", "import",
    "index", "indigo", "inform", "inner", "input", "insect", "inside", "invite",
    "iron", "island", "ivory", "jacket", "jaguar", "jasmine", "jelly", "jewel",
    "journal", "journey", "jungle", "junior", "jupiter", "justice", "keeper",
    "kernel", "kettle", "kindle", "kitchen", "knight", "label", "ladder",
    "lagoon", "lantern", "laptop", "large", "laser", "latin", "launch",
    "laurel", "layer", "leader", "ledger", "legend", "lemon", "level", "liberty",
    "library", "light", "lilac", "limit", "linen", "lion", "liquid", "listen",
    "little", "lively", "lizard", "lobby", "local", "locker", "lodge", "logic",
    "lotus", "lucky", "lumber", "lunar", "machine", "magnet", "maiden", "major",
    "mango", "manner", "manual", "maple", "marble", "margin", "marine", "market",
    "master", "matrix", "meadow", "medal", "media", "melody", "member", "memory",
    "mentor", "merit", "metal", "meteor", "method", "metro", "middle", "mild",
    "mineral", "minute", "mirror", "mobile", "model", "modern", "moment",
    "monitor", "morning", "mosaic", "motion", "motor", "mountain", "movie",
    "muffin", "museum", "music", "mystic", "napkin", "narrow", "nation",
    "native", "nature", "nectar", "needle", "nickel", "night", "noble", "north",
    "notion", "novel", "nugget", "number", "nursery", "oasis", "object",
    "ocean", "office", "olive", "onion", "opera", "orange", "orbit", "orchard",
    "order", "organ", "origin", "otter", "outer", "output", "oxide", "oyster",
    "packet", "palace", "panel", "pantry", "paper", "parade", "parcel", "parent",
    "parlor", "partner", "pasture", "patent", "patrol", "pattern", "pearl",
    "pebble", "pencil", "people", "pepper", "perfect", "person", "phase",
    "phrase", "picnic", "picture", "pigeon", "pillar", "pillow", "pilot",
    "pioneer", "piston", "planet", "plasma", "platform", "plaza", "pledge",
    "pocket", "policy", "pollen", "ponder", "poplar", "portal", "poster",
    "powder", "power", "prairie", "present", "pretty", "primary", "prince",
    "print", "prism", "private", "prize", "profile", "program", "project",
    "proof", "proper", "public", "pulse", "pumpkin", "pupil", "purple",
    "purpose", "puzzle", "quaint", "quality", "quarter", "quartz", "query",
    "quest", "quiet", "quill", "quilt", "rabbit", "raccoon", "radar", "radio",
    "rainbow", "random", "ranger", "rapid", "raven", "reason", "record",
    "reform", "region", "relay", "remedy", "report", "rescue", "reserve",
    "resort", "result", "retail", "reward", "rhythm", "ribbon", "rider",
    "ridge", "ripple", "river", "roast", "robin", "rocket", "rubber", "ruby",
    "rural", "rustic", "saddle", "safari", "sailor", "salad", "salmon",
    "sample", "sandal", "sapphire", "satin", "scale", "scarlet", "scene",
    "scholar", "school", "science", "scope", "scout", "screen", "script",
    "sculpt", "season", "secret", "sector", "secure", "senior", "sense",
    "sequel", "service", "shadow", "shelter", "sherif", "shield", "shore",
    "signal", "silent", "silver", "simple", "singer", "sketch", "slate",
    "slogan", "smooth", "social", "solar", "solid", "sonnet", "source", "south",
    "space", "sparrow", "spice", "spirit", "splendid", "sponge", "spring",
    "spruce", "square", "stable", "stadium", "staff", "stage", "stanza",
    "staple", "static", "statue", "steady", "steam", "steel", "stereo",
    "stone", "store", "storm", "story", "stream", "street", "stride", "string",
    "studio", "study", "style", "sugar", "summer", "summit", "sunny", "sunset",
    "supply", "surface", "swan", "sweet", "swift", "symbol", "syrup", "system",
    "table", "tailor", "talent", "target", "tavern", "temple", "tender",
    "tennis", "terrace", "theater", "theory", "thermal", "thicket", "thimble",
    "thread", "thrive", "thunder", "ticket", "tiger", "timber", "tissue",
    "title", "toast", "token", "tomato", "tonic", "topaz", "torch", "total",
    "tower", "trade", "trail", "transit", "travel", "treasure", "treaty",
    "tribune", "tricky", "trio", "triumph", "trolley", "tropic", "trumpet",
    "tulip", "tunnel", "turbine", "turtle", "tutor", "twilight", "umbrella",
    "unique", "unity", "update", "upper", "urban", "useful", "utility",
    "vacuum", "valley", "vanilla", "vapor", "vast", "vector", "velvet",
    "vendor", "venture", "verse", "vessel", "veteran", "victor", "video",
    "village", "vintage", "violet", "virtue", "vision", "visual", "vivid",
    "vocal", "volume", "voyage", "waffle", "wagon", "walnut", "walrus",
    "warden", "warm", "water", "weather", "weaver", "welcome", "wheat",
    "whisper", "widget", "willow", "window", "winter", "wisdom", "wizard",
    "wonder", "wooden", "worker", "world", "worthy", "wreath", "writer",
    "yellow", "yield", "yonder", "young", "zebra", "zenith", "zephyr", "zinc",
)
