# Single-token vocabularies for probe generation. Every entry must match \w+
# exactly once so needle token counts stay fixed.
FIRST_NAMES = (
    "Amara", "Bastian", "Celeste", "Dmitri", "Elena", "Farid", "Greta", "Hiro", "Ines", "Jonas",
    "Kaveh", "Lucia", "Mateo", "Nadia", "Oskar", "Priya", "Quentin", "Rosa", "Stefan", "Tamsin",
    "Umar", "Vera", "Wendell", "Ximena", "Yusuf", "Zofia", "Anselm", "Beatrix", "Cyrus", "Delphine",
    "Emeric", "Fiona", "Gideon", "Helga", "Ivo", "Jasmine", "Kasimir", "Leonie", "Milo", "Noor",
    "Orla", "Pavel", "Rafaela", "Soren", "Thea", "Ulrich", "Valentina", "Wiebke", "Yara", "Zeno",
)
LAST_NAMES = (
    "Abernathy", "Brandauer", "Castellano", "Drummond", "Eriksen", "Fairbanks", "Galloway", "Halvorsen",
    "Ibarra", "Jankowski", "Kowalczyk", "Lindqvist", "Marchetti", "Nakamura", "Okonkwo", "Petrovic",
    "Quinlan", "Rasmussen", "Sandoval", "Takahashi", "Underwood", "Valdivia", "Whitcombe", "Yamamoto",
    "Zielinski", "Albrecht", "Bellweather", "Cordova", "Dunmore", "Esposito", "Fitzgerald", "Grimaldi",
    "Hargreaves", "Iwasaki", "Jovanovic", "Kensington", "Lombardi", "Montague", "Nieminen", "Ortega",
)
CITIES = (
    "Aberdeen", "Bergen", "Coimbra", "Dresden", "Edinburgh", "Florence", "Ghent", "Heidelberg",
    "Innsbruck", "Jena", "Krakow", "Leiden", "Malmo", "Nantes", "Oslo", "Porto", "Quebec", "Rotterdam",
    "Salamanca", "Tartu", "Uppsala", "Valencia", "Warsaw", "Zagreb", "Antwerp", "Bologna", "Cardiff",
    "Delft", "Eindhoven", "Freiburg", "Graz", "Helsinki", "Izmir", "Kyoto", "Lyon", "Madrid", "Nagoya",
    "Osaka", "Padua", "Riga", "Seville", "Turin", "Utrecht", "Vilnius", "Wellington", "Yokohama",
    "Zurich", "Adelaide", "Brisbane", "Calgary", "Durban", "Fresno", "Glasgow", "Hobart", "Lisbon",
    "Montreal", "Naples", "Ottawa", "Perth", "Sapporo", "Tampere", "Verona", "Winnipeg", "Bremen",
)
AWARD_NAMES = (
    "Halden", "Marrow", "Estrin", "Valcourt", "Brennick", "Ostara", "Tilmann", "Corvath", "Lindell",
    "Sarrazin", "Pemberton", "Aldous", "Kirchner", "Montrose", "Delacroix", "Whitlock", "Fenwick",
    "Arkwright", "Bellamy", "Castine",
)
AWARD_KINDS = ("Prize", "Medal", "Award", "Fellowship")
FILLER = (
    "the", "committee", "reviewed", "annual", "report", "regional", "archive", "survey", "records",
    "indicate", "several", "minor", "revisions", "during", "spring", "session", "members", "noted",
    "budget", "transport", "library", "council", "discussed", "weather", "harvest", "market",
    "shipment", "schedule", "delayed", "because", "of", "routine", "maintenance", "on", "northern",
    "bridge", "local", "museum", "opened", "new", "gallery", "visitors", "praised", "lighting",
    "while", "engineers", "measured", "river", "levels", "each", "morning", "and", "evening", "a",
    "small", "team", "catalogued", "historic", "maps", "from", "coastal", "villages", "in", "its",
    "collection", "press", "office", "issued", "brief", "statement", "about", "parking", "changes",
)
