"""Undo log shared by the backtrackable theory structures."""


class Journal:
    __slots__ = ("log",)

    def __init__(self):
        self.log = []

    def mark(self) -> int:
        return len(self.log)

    def push(self, undo):
        self.log.append(undo)

    def undo_to(self, mark: int):
        log = self.log
        while len(log) > mark:
            log.pop()()

    # common mutations

    def setitem(self, container, key, value):
        old = container[key]
        container[key] = value
        self.log.append(lambda: container.__setitem__(key, old))

    def dict_set(self, d, key, value):
        if key in d:
            old = d[key]
            d[key] = value
            self.log.append(lambda: d.__setitem__(key, old))
        else:
            d[key] = value
            self.log.append(lambda: d.__delitem__(key))

    def dict_del(self, d, key):
        old = d.pop(key)
        self.log.append(lambda: d.__setitem__(key, old))

    def append(self, lst, x):
        lst.append(x)
        self.log.append(lst.pop)

    def extend(self, lst, items):
        n = len(lst)
        lst.extend(items)
        self.log.append(lambda: lst.__delitem__(slice(n, None)))

    def set_add(self, s, x):
        if x not in s:
            s.add(x)
            self.log.append(lambda: s.discard(x))

    def set_discard(self, s, x):
        if x in s:
            s.discard(x)
            self.log.append(lambda: s.add(x))

    def setattr(self, obj, name, value):
        old = getattr(obj, name)
        setattr(obj, name, value)
        self.log.append(lambda: setattr(obj, name, old))
