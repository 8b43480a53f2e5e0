#!/usr/bin/env python3
"""Writes the checked-in seed corpus fixtures.

The stories are assembled from sentence frames so the corpus is lint-clean
by construction: first/third person only, descriptive sentences outnumber
coaching sentences at least 2:1, and no idiom, tone or vocabulary entries.
"""
import argparse
import hashlib
import json
import re

CHAPTERS = [
    ("Daily Routines", "Introduces the steps of everyday routines so that each part of the day feels predictable.", [
        ("brush my teeth", "brushing my teeth", "toothbrush"),
        ("get dressed in the morning", "getting dressed in the morning", "clothes"),
        ("take a bath", "taking a bath", "bath"),
        ("eat breakfast", "eating breakfast", "breakfast"),
        ("pack my school bag", "packing my school bag", "bag"),
        ("go to bed at night", "going to bed at night", "bedtime"),
        ("wash my hands", "washing my hands", "soap"),
        ("comb my hair", "combing my hair", "comb"),
        ("put away my toys", "putting away my toys", "toys"),
        ("set the table for dinner", "setting the table for dinner", "plates"),
        ("wake up with an alarm", "waking up with an alarm", "alarm"),
        ("feed the family cat", "feeding the family cat", "cat"),
        ("choose a bedtime book", "choosing a bedtime book", "book"),
    ]),
    ("Making Friends", "Shows how friendships begin and grow through small shared moments.", [
        ("say hello to a new classmate", "saying hello to a new classmate", "classmate"),
        ("join a game at recess", "joining a game at recess", "game"),
        ("share crayons at the art table", "sharing crayons at the art table", "crayons"),
        ("invite a friend to play", "inviting a friend to play", "friend"),
        ("learn a friend's name", "learning a friend's name", "name"),
        ("take turns on the slide", "taking turns on the slide", "slide"),
        ("give a compliment", "giving a compliment", "compliment"),
        ("sit with someone at lunch", "sitting with someone at lunch", "lunch"),
        ("trade stickers with a friend", "trading stickers with a friend", "stickers"),
        ("build a tower together", "building a tower together", "tower"),
        ("wave goodbye after school", "waving goodbye after school", "goodbye"),
        ("plan a playdate", "planning a playdate", "playdate"),
        ("make a birthday card for a friend", "making a birthday card for a friend", "card"),
    ]),
    ("Feelings and Emotions", "Helps children notice their feelings and find calm ways to express them.", [
        ("notice when I feel worried", "noticing when I feel worried", "worry"),
        ("calm down with deep breaths", "calming down with deep breaths", "breaths"),
        ("tell someone I am sad", "telling someone I am sad", "sadness"),
        ("feel excited about a trip", "feeling excited about a trip", "trip"),
        ("use a calm corner", "using a calm corner", "corner"),
        ("name my feelings", "naming my feelings", "feelings"),
        ("feel proud of my work", "feeling proud of my work", "pride"),
        ("wait when I feel impatient", "waiting when I feel impatient", "patience"),
        ("handle a change of plans", "handling a change of plans", "plans"),
        ("feel nervous before a test", "feeling nervous before a test", "test"),
        ("hug a stuffed animal for comfort", "hugging a stuffed animal for comfort", "comfort"),
        ("draw a picture of my mood", "drawing a picture of my mood", "mood"),
        ("smile at a friendly face", "smiling at a friendly face", "smile"),
    ]),
    ("School Life", "Prepares children for classroom routines, teachers and school spaces.", [
        ("raise my hand in class", "raising my hand in class", "hand"),
        ("line up for recess", "lining up for recess", "recess"),
        ("ride the school bus", "riding the school bus", "bus"),
        ("meet a substitute teacher", "meeting a substitute teacher", "teacher"),
        ("visit the school library", "visiting the school library", "library"),
        ("practice a fire drill", "practicing a fire drill", "drill"),
        ("eat in the cafeteria", "eating in the cafeteria", "cafeteria"),
        ("hand in my homework", "handing in my homework", "homework"),
        ("work in a small group", "working in a small group", "group"),
        ("go to music class", "going to music class", "music"),
        ("take a spelling quiz", "taking a spelling quiz", "quiz"),
        ("attend a school assembly", "attending a school assembly", "assembly"),
        ("use the classroom computer", "using the classroom computer", "computer"),
    ]),
    ("Community Outings", "Describes common trips into the community and what usually happens there.", [
        ("shop at the grocery store", "shopping at the grocery store", "groceries"),
        ("wait in line at the bank", "waiting in line at the bank", "bank"),
        ("visit the post office", "visiting the post office", "letters"),
        ("go to a restaurant", "going to a restaurant", "menu"),
        ("get a haircut", "getting a haircut", "haircut"),
        ("ride an elevator", "riding an elevator", "elevator"),
        ("visit the public pool", "visiting the public pool", "pool"),
        ("go to the movie theater", "going to the movie theater", "movie"),
        ("borrow books from the library", "borrowing books from the library", "library card"),
        ("buy shoes at the mall", "buying shoes at the mall", "shoes"),
        ("visit a farmers market", "visiting a farmers market", "market"),
        ("ride a train downtown", "riding a train downtown", "train"),
        ("stop at a gas station", "stopping at a gas station", "fuel"),
    ]),
    ("Health and Doctor Visits", "Explains medical visits and healthy habits in calm, clear steps.", [
        ("visit the dentist", "visiting the dentist", "dentist"),
        ("get a checkup at the doctor", "getting a checkup at the doctor", "checkup"),
        ("take medicine", "taking medicine", "medicine"),
        ("get my eyes checked", "getting my eyes checked", "glasses"),
        ("have my temperature taken", "having my temperature taken", "thermometer"),
        ("wear a bandage", "wearing a bandage", "bandage"),
        ("drink enough water", "drinking enough water", "water"),
        ("rest when I am sick", "resting when I am sick", "rest"),
        ("get a flu shot", "getting a flu shot", "shot"),
        ("visit the school nurse", "visiting the school nurse", "nurse"),
        ("blow my nose with a tissue", "blowing my nose with a tissue", "tissue"),
        ("cover a cough", "covering a cough", "cough"),
        ("eat fruits and vegetables", "eating fruits and vegetables", "vegetables"),
    ]),
    ("Safety", "Teaches simple safety routines at home, at school and outdoors.", [
        ("cross the street", "crossing the street", "crosswalk"),
        ("wear a bike helmet", "wearing a bike helmet", "helmet"),
        ("buckle my seat belt", "buckling my seat belt", "seat belt"),
        ("stay close in a crowd", "staying close in a crowd", "crowd"),
        ("learn my home address", "learning my home address", "address"),
        ("use sunscreen at the beach", "using sunscreen at the beach", "sunscreen"),
        ("swim with a lifeguard nearby", "swimming with a lifeguard nearby", "lifeguard"),
        ("stay inside during a storm", "staying inside during a storm", "storm"),
        ("find a helper if I get lost", "finding a helper if I get lost", "helper"),
        ("answer the door with a grown-up", "answering the door with a grown-up", "door"),
        ("walk in a parking lot", "walking in a parking lot", "parking lot"),
        ("hold hands near traffic", "holding hands near traffic", "traffic"),
    ]),
    ("Family Life", "Describes family routines, visits and changes at home.", [
        ("welcome a new baby sister", "welcoming a new baby sister", "baby"),
        ("visit grandma and grandpa", "visiting grandma and grandpa", "grandparents"),
        ("help cook dinner", "helping cook dinner", "kitchen"),
        ("share a room with my brother", "sharing a room with my brother", "room"),
        ("go on a family picnic", "going on a family picnic", "picnic"),
        ("move to a new house", "moving to a new house", "boxes"),
        ("stay with a babysitter", "staying with a babysitter", "babysitter"),
        ("celebrate a family birthday", "celebrating a family birthday", "cake"),
        ("do chores on the weekend", "doing chores on the weekend", "chores"),
        ("call a cousin on video chat", "calling a cousin on video chat", "video chat"),
        ("take care of a houseplant", "taking care of a houseplant", "plant"),
        ("wait while a parent is on the phone", "waiting while a parent is on the phone", "phone"),
        ("watch a family movie night", "watching a family movie night", "popcorn"),
    ]),
    ("Holidays and Celebrations", "Prepares children for the sights, sounds and customs of special days.", [
        ("go to a birthday party", "going to a birthday party", "party"),
        ("open presents", "opening presents", "presents"),
        ("watch fireworks", "watching fireworks", "fireworks"),
        ("wear a costume", "wearing a costume", "costume"),
        ("decorate a tree", "decorating a tree", "decorations"),
        ("attend a wedding", "attending a wedding", "wedding"),
        ("sing at a celebration", "singing at a celebration", "song"),
        ("eat a holiday meal", "eating a holiday meal", "meal"),
        ("give a gift to a friend", "giving a gift to a friend", "gift"),
        ("see a parade", "seeing a parade", "parade"),
        ("hunt for eggs in the garden", "hunting for eggs in the garden", "eggs"),
        ("light candles on a cake", "lighting candles on a cake", "candles"),
        ("send holiday cards", "sending holiday cards", "envelopes"),
    ]),
    ("Communication", "Builds everyday conversation skills such as greeting, asking and listening.", [
        ("ask for help", "asking for help", "help"),
        ("listen when someone talks", "listening when someone talks", "listening"),
        ("use a quiet voice", "using a quiet voice", "voice"),
        ("say thanks", "saying thanks", "thanks"),
        ("introduce myself", "introducing myself", "introduction"),
        ("answer a question", "answering a question", "question"),
        ("order food at a counter", "ordering food at a counter", "order"),
        ("talk on the telephone", "talking on the telephone", "telephone"),
        ("wait for my turn to speak", "waiting for my turn to speak", "turn"),
        ("say sorry", "apologizing", "apology"),
        ("make eye contact", "making eye contact", "eyes"),
        ("use a picture board", "using a picture board", "pictures"),
        ("tell a story at show and tell", "telling a story at show and tell", "show and tell"),
    ]),
    ("Play and Leisure", "Explores games, hobbies and free time with others and alone.", [
        ("play a board game", "playing a board game", "board game"),
        ("lose a game calmly", "losing a game calmly", "score"),
        ("play at the playground", "playing at the playground", "playground"),
        ("do a puzzle", "doing a puzzle", "puzzle"),
        ("paint a picture", "painting a picture", "paint"),
        ("play with modeling clay", "playing with modeling clay", "clay"),
        ("ride my bike in the park", "riding my bike in the park", "bike"),
        ("fly a kite", "flying a kite", "kite"),
        ("play a video game with a friend", "playing a video game with a friend", "controller"),
        ("build with blocks", "building with blocks", "blocks"),
        ("join a dance class", "joining a dance class", "dance"),
        ("plant seeds in the garden", "planting seeds in the garden", "seeds"),
        ("play catch in the yard", "playing catch in the yard", "ball"),
    ]),
    ("Sensory Experiences", "Describes loud, bright or crowded places and calm ways to manage them.", [
        ("hear a loud hand dryer", "hearing a loud hand dryer", "hand dryer"),
        ("wear new socks", "wearing new socks", "socks"),
        ("taste a new food", "tasting a new food", "food"),
        ("use headphones in a noisy room", "using headphones in a noisy room", "headphones"),
        ("visit a bright store", "visiting a bright store", "lights"),
        ("smell strong perfume", "smelling strong perfume", "perfume"),
        ("touch sticky glue", "touching sticky glue", "glue"),
        ("hear a siren outside", "hearing a siren outside", "siren"),
        ("sit on a wobbly chair", "sitting on a wobbly chair", "chair"),
        ("feel rain on my skin", "feeling rain on my skin", "rain"),
        ("hear a vacuum cleaner", "hearing a vacuum cleaner", "vacuum"),
        ("wear a wool sweater", "wearing a wool sweater", "sweater"),
    ]),
    ("Changes and Transitions", "Supports children through new places, new people and changes in routine.", [
        ("start a new school year", "starting a new school year", "school year"),
        ("stop playing when it is time to leave", "stopping play when it is time to leave", "timer"),
        ("meet a new neighbor", "meeting a new neighbor", "neighbor"),
        ("change classrooms", "changing classrooms", "classroom"),
        ("travel on an airplane", "traveling on an airplane", "airplane"),
        ("stay in a hotel", "staying in a hotel", "hotel"),
        ("get a new teacher", "getting a new teacher", "new teacher"),
        ("switch activities", "switching activities", "schedule"),
        ("go back to school after a break", "going back to school after a break", "break"),
        ("try a new after school club", "trying a new after school club", "club"),
        ("wait for a late bus", "waiting for a late bus", "bus stop"),
        ("see a new dentist", "seeing a new dentist", "office"),
    ]),
    ("Kindness and Helping", "Encourages caring actions that help family, classmates and neighbors.", [
        ("help a classmate pick up papers", "helping a classmate pick up papers", "papers"),
        ("hold the door open", "holding the door open", "door handle"),
        ("share a snack", "sharing a snack", "snack"),
        ("help clean the classroom", "helping clean the classroom", "classroom chores"),
        ("comfort a crying friend", "comforting a crying friend", "tears"),
        ("write a note of thanks", "writing a note of thanks", "note"),
        ("feed birds in winter", "feeding birds in winter", "birds"),
        ("donate old toys", "donating old toys", "donation"),
        ("carry groceries for grandma", "carrying groceries for grandma", "grocery bags"),
        ("water the neighbor's flowers", "watering the neighbor's flowers", "flowers"),
        ("include someone in a game", "including someone in a game", "team"),
        ("help a sibling with homework", "helping a sibling with homework", "worksheet"),
        ("pick up litter at the park", "picking up litter at the park", "litter"),
    ]),
]

HELPERS = ["Mom", "Dad", "My teacher", "Grandma", "My older brother", "Ms. Lopez", "Mr. Chen", "My aunt"]
PLACES_OF_DAY = ["in the morning", "after lunch", "on the weekend", "some afternoons", "on school days", "once in a while"]

BANNED = re.compile(r"you|autis", re.IGNORECASE)


def pick(seq, key, salt):
    h = int(hashlib.sha256(f"{key}|{salt}".encode()).hexdigest(), 16)
    return seq[h % len(seq)]


def title_of(base, gerund, style):
    words = gerund.split()
    cap = " ".join(w if w in ("a", "an", "the", "at", "in", "on", "to", "with", "for", "of", "and") else w[:1].upper() + w[1:]
                   for w in words)
    cap = cap[:1].upper() + cap[1:]
    if style == 0:
        return cap
    if style == 1:
        return "How to " + base[:1].upper() + base[1:]
    if style == 2:
        return "When I " + base[:1].upper() + base[1:]
    return cap + " Calmly" if not gerund.endswith("calmly") else cap


def story(gerund, base, noun, key):
    helper = pick(HELPERS, key, "helper")
    when = pick(PLACES_OF_DAY, key, "when")
    g_cap = gerund[:1].upper() + gerund[1:]
    intro = [
        f"This story is about {gerund}.",
        f"{g_cap} is something many people do {when}.",
        pick([f"There is a {noun} involved in {gerund}.",
              f"The {noun} is an important part of {gerund}."], key, "i3"),
    ]
    body = [
        f"When I am {gerund}, there may be sounds and people around me.",
        pick([f"{helper} knows that {gerund} can feel new at first.",
              f"{helper} says that {gerund} gets easier with practice."], key, "b2"),
        f"Other children are {gerund} too, and that is okay.",
        f"{helper} can show each step of {gerund}.",
        pick(["I will try to take slow breaths and stay calm.",
              f"I will try to look at the {noun} and count to five."], key, "c1"),
        pick([f"Sometimes the {noun} looks a little different, and that is okay too.",
              f"Each time is a chance to learn something about the {noun}."], key, "b5"),
    ]
    if pick([0, 1, 2], key, "c2") == 0:
        body.append(f"I can ask {helper.lower() if helper.startswith('My') else helper} for help with {gerund}.")
    concl = [
        f"{g_cap} is a part of my life.",
        pick([f"{helper} feels happy when I practice {gerund}.",
              f"Every time I practice {gerund}, it becomes more familiar."], key, "e2"),
    ]
    return " ".join(intro), " ".join(body), " ".join(concl)


def build():
    chapters, pairs = [], []
    n = 0
    for ci, (name, explanation, acts) in enumerate(CHAPTERS, start=1):
        cid = f"seed-ch-{ci:02d}"
        chapters.append({"kind": "chapter", "id": cid, "name": name, "explanation": explanation, "origin": "seed"})
        for ai, (base, gerund, noun) in enumerate(acts):
            n += 1
            key = f"{cid}-{ai}"
            intro, body, concl = story(gerund, base, noun, key)
            t = title_of(base, gerund, (ci + ai) % 4)
            for text in (t, intro, body, concl):
                if BANNED.search(text):
                    raise SystemExit(f"banned token in {key}: {text}")
            pairs.append({"kind": "pair", "id": f"seed-{n:03d}", "chapter_id": cid, "title": t,
                          "introduction": intro, "main_body": body, "conclusion": concl, "origin": "seed"})
    return chapters, pairs


def write(path, records):
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False, separators=(",", ":")) + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default="tests/fixtures")
    args = ap.parse_args()
    chapters, pairs = build()
    write(f"{args.out_dir}/compliant.jsonl", chapters + pairs)
    # The grow seed leaves two explanations blank so Taking Root has work to do.
    grow_chapters = [dict(c) for c in chapters]
    for c in grow_chapters[-2:]:
        c["explanation"] = ""
    write(f"{args.out_dir}/seed_corpus.jsonl", grow_chapters + pairs)
    print(f"{len(chapters)} chapters, {len(pairs)} pairs")


if __name__ == "__main__":
    main()
