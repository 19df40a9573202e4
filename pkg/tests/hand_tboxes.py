"""Hand-classified TBoxes: (id, text, accepted, expected kinds or violation)."""

ACCEPTING = [
    ("acyclic-only", """
        primitive A, C; role R;
        D := (and A (some R C));
        E := (or D (not C));
     """, {"D": "acyclic", "E": "acyclic"}),
    ("feature-eventuality-a", """
        primitive A; feature f;
        B := (or A (some f B));
        Bp := (and (not A) (all f Bp));
     """, {"B": "eventuality-a", "Bp": "necessity-a"}),
    ("role-forms-b", """
        primitive A, C; role R;
        N := (and A (or C (all R N)));
        E := (or (not A) (and (not C) (some R E)));
     """, {"N": "necessity-b", "E": "eventuality-b"}),
    ("commuted-operands", """
        primitive A; role R;
        N := (and (all R N) A);
        E := (or (some R E) (not A));
     """, {"N": "necessity-a", "E": "eventuality-a"}),
    ("bare-quantifier", """
        role R;
        N := (all R N);
        E := (some R E);
     """, {"N": "necessity-a", "E": "eventuality-a"}),
    ("mixed-with-acyclic-users", """
        primitive A, C; role R, S;
        D := (and A C);
        N := (and D (all R N));
        E := (or (not D) (some R E));
        X := (some S N);
     """, {"D": "acyclic", "N": "necessity-a", "E": "eventuality-a", "X": "acyclic"}),
]

REJECTING = [
    ("mutual-cycle", """
        primitive A;
        X := (and A Y);
        Y := (or A X);
     """, "mutual-cycle", ("X", "Y")),
    ("free-occurrence", """
        primitive A;
        B := (and A B);
     """, "depth", ("B",)),
    ("double-nesting", """
        role R;
        B := (some R (some R B));
     """, "depth", ("B",)),
    ("mixed-depths", """
        role R;
        B := (or B (some R B));
     """, "depth", ("B",)),
    ("wrong-shape", """
        primitive A; role R;
        B := (and A (some R B));
        Bd := (or (not A) (all R Bd));
     """, "shape", ("B",)),
    ("dual-missing", """
        primitive A; role R;
        B := (or A (some R B));
     """, "dual-missing", ("B",)),
]
